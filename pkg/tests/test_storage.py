import numpy as np
import pytest
from PIL import Image

from affine_vlab.core.errors import ConfigParseError
from affine_vlab.numerics.fields import bump
from affine_vlab.utils.storage import (
    FIELD_HEADER,
    dump_field,
    format_number,
    heatmap_pixels,
    load_field,
    read_csv,
    write_csv,
    write_png,
)


def test_format_number():
    assert format_number(0.1) == "0.10000000000000001"
    assert format_number(True) == "1"
    assert format_number(np.int64(7)) == "7"
    assert format_number(np.float64(2.5)) == "2.5"
    assert format_number("affine") == "affine"


def test_csv_round_trip(tmp_path):
    path = write_csv(tmp_path / "out" / "t.csv", ["a", "b"], [(1, 0.5), (2, False)], timestamp=True)
    assert path.read_text().startswith("# generated")
    rows = read_csv(path)
    assert rows == [{"a": "1", "b": "0.5"}, {"a": "2", "b": "0"}]


def test_field_dump_and_load(tmp_path, disk_bump):
    path = dump_field(disk_bump, tmp_path / "bump.field")
    lines = path.read_text().splitlines()
    assert lines[0] == FIELD_HEADER
    assert lines[1].split()[:2] == ["2", format_number(disk_bump.dom.h)]

    loaded = load_field(path)
    assert loaded.dom.shape == disk_bump.dom.shape
    assert loaded.dom.h == disk_bump.dom.h
    assert np.array_equal(loaded.values, disk_bump.values)


def test_3d_field_dump(tmp_path, ball_grid):
    u = bump(ball_grid, radius=1.0)
    loaded = load_field(dump_field(u, tmp_path / "ball.field"))
    assert loaded.dom.dim == 3
    assert np.array_equal(loaded.values, u.values)


@pytest.mark.parametrize(
    "text, line",
    [
        ("not a field\n", 1),
        (FIELD_HEADER + "\n2 0.5\n", 2),
        (FIELD_HEADER + "\n2 0.5 2 2\n0 1\n", 3),
        (FIELD_HEADER + "\n2 0.5 2 2\n0 1\n0 x\n", 4),
    ],
)
def test_malformed_field_files(tmp_path, text, line):
    path = tmp_path / "bad.field"
    path.write_text(text)
    with pytest.raises(ConfigParseError) as exc:
        load_field(path)
    assert exc.value.line == line


def test_heatmap_orientation(disk_bump):
    pixels = heatmap_pixels(disk_bump)
    nx, ny = disk_bump.dom.shape
    assert pixels.shape == (ny, nx)
    assert pixels.dtype == np.uint8
    assert pixels.max() == 255 and pixels.min() == 0


def test_png_heatmap(tmp_path, disk_bump):
    path = write_png(disk_bump, tmp_path / "bump.png")
    with Image.open(path) as img:
        assert img.mode == "L"
        assert img.size == (disk_bump.dom.shape[0], disk_bump.dom.shape[1])
