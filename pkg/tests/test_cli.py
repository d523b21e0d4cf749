import pytest

from affine_vlab.cli.commands import RESOLVED_CONFIG
from affine_vlab.cli.main import main
from affine_vlab.cli.parser import parse_config, parse_pairs
from affine_vlab.core.errors import ConfigParseError, ConfigValidationError
from affine_vlab.utils.storage import read_csv


# ==================== Config parsing ====================

def test_minimal_config():
    cfg = parse_config("command = constants\nn = 3\np = 2\n")
    assert cfg.command == "constants"
    assert cfg.n == 3 and cfg.p == 2.0


def test_comments_and_list_values():
    text = """
    # ellipse eigen run
    domain = ellipse   # trailing comment
    half_axes = 1.0, 0.6
    lambda = 0.5
    checks = alpha_identity, kernel_identities
    """
    cfg = parse_config(text, command="eigen")
    assert cfg.half_axes == [1.0, 0.6]
    assert cfg.lambda_ == 0.5
    assert cfg.checks == ["alpha_identity", "kernel_identities"]
    assert cfg.domain_spec().kind == "ellipse"


def test_supercritical_q_is_a_validation_error():
    with pytest.raises(ConfigValidationError) as exc:
        parse_config("command = solve\nn = 3\np = 2\nq = 7\n")
    assert "p*" in str(exc.value)
    assert exc.value.exit_code == 3


def test_energy_accepts_p_one():
    cfg = parse_config("p = 1\n", command="energy")
    assert cfg.p == 1.0
    with pytest.raises(ConfigValidationError):
        parse_config("p = 0.5\n", command="energy")


@pytest.mark.parametrize("command", ["eigen", "energy", "scan-lambda", "dump-field"])
def test_q_is_validated_for_every_command(command):
    with pytest.raises(ConfigValidationError) as exc:
        parse_config("n = 3\np = 2\nq = 7\n", command=command)
    assert exc.value.exit_code == 3


@pytest.mark.parametrize(
    "text, line",
    [
        ("n = 3\nn = 2\n", 2),
        ("n = 3\nbogus_key = 1\n", 2),
        ("p 2\n", 1),
        ("\n\n3x = 1\n", 3),
        ("p =\n", 1),
    ],
)
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ConfigParseError) as exc:
        parse_pairs(text)
    assert exc.value.line == line
    assert exc.value.exit_code == 2


def test_command_conflict():
    with pytest.raises(ConfigValidationError):
        parse_config("command = eigen\n", command="solve")


def test_solve_needs_q():
    with pytest.raises(ConfigValidationError):
        parse_config("p = 1.5\n", command="solve")


def test_resolved_config_round_trips():
    cfg = parse_config("domain = polygon\nvertices = 0 0; 1 0; 0 1\np = 1.5\nq = 3\n", command="solve")
    again = parse_config(cfg.to_text())
    assert again == cfg


# ==================== Commands ====================

def test_constants_command(tmp_path):
    assert main(["constants", "--set", "n=3", "--set", "p=2", "-o", str(tmp_path)]) == 0
    rows = {row["name"]: float(row["value"]) for row in read_csv(tmp_path / "constants.csv")}
    assert rows["k_np"] == pytest.approx(0.42727, abs=1e-5)
    assert rows["talenti"] == pytest.approx(rows["k_np"], rel=1e-12)
    assert (tmp_path / RESOLVED_CONFIG).read_text().startswith("command = constants")


def test_config_file_and_reruns_are_byte_identical(tmp_path):
    config = tmp_path / "energy.txt"
    config.write_text("h = 0.1\np = 1.5\nsource = random\nseed = 4\n")
    first, second = tmp_path / "a", tmp_path / "b"
    assert main(["energy", str(config), "-o", str(first)]) == 0
    assert main(["energy", str(config), "-o", str(second)]) == 0
    for name in ("energy.csv", "psi.csv"):
        assert (first / name).read_bytes() == (second / name).read_bytes()
    row = read_csv(first / "energy.csv")[0]
    assert float(row["E"]) <= float(row["grad_norm"]) * 1.01


def test_dump_field_then_heatmap(tmp_path):
    assert main(["dump-field", "--set", "h=0.1", "-o", str(tmp_path)]) == 0
    field = tmp_path / "bump.field"
    assert field.read_text().startswith("# affine-field v1")

    assert main(["heatmap", "--set", f"field={field}", "-o", str(tmp_path)]) == 0
    lines = (tmp_path / "bump.pgm").read_text().splitlines()
    assert lines[0] == "P2"
    width, height = (int(v) for v in lines[1].split())
    assert lines[2] == "255"
    assert len(lines) == 3 + height
    assert all(len(row.split()) == width for row in lines[3:])


def test_energy_of_dumped_field(tmp_path):
    assert main(["dump-field", "--set", "h=0.05", "-o", str(tmp_path)]) == 0
    assert main(["energy", "--set", f"field={tmp_path / 'bump.field'}", "-o", str(tmp_path)]) == 0
    row = read_csv(tmp_path / "energy.csv")[0]
    assert float(row["E"]) == pytest.approx(float(row["grad_norm"]), rel=0.02)


def test_exit_codes(tmp_path):
    assert main(["solve", str(tmp_path / "missing.txt")]) == 2
    assert main(["solve", "--set", "n=3", "--set", "p=2", "--set", "q=7", "-o", str(tmp_path)]) == 3
    assert main(["constants", "--set", "not_a_key=1", "-o", str(tmp_path)]) == 2
    assert main(["verify", "--set", "checks=no_such_check", "-o", str(tmp_path)]) == 3


def test_verify_failure_exit_code(tmp_path):
    code = main(["verify", "--set", "checks=comparison_inequality", "--set", "corrupt=true", "-o", str(tmp_path)])
    assert code == 6
    rows = read_csv(tmp_path / "verify.csv")
    assert rows[0]["passed"] == "0"
    assert rows[0]["error"] == "NonFinite"


def test_timestamp_line_is_skipped_on_read(tmp_path):
    assert main(["constants", "--set", "n=2", "--set", "p=1.5", "--timestamp", "-o", str(tmp_path)]) == 0
    text = (tmp_path / "constants.csv").read_text()
    assert text.startswith("# generated ")
    assert read_csv(tmp_path / "constants.csv")[0]["name"] == "n"


def test_energy_command_at_p_one(tmp_path):
    assert main(["energy", "--set", "p=1", "--set", "h=0.05", "-o", str(tmp_path)]) == 0
    row = read_csv(tmp_path / "energy.csv")[0]
    assert float(row["E"]) > 0


def test_eigen_rejects_supercritical_q(tmp_path):
    assert main(["eigen", "--set", "n=3", "--set", "p=2", "--set", "q=7", "-o", str(tmp_path)]) == 3
