"""
Subcommand implementations.

Every command takes a validated RunConfig and the output directory, writes
its CSV and field files there and returns the process exit code. Library
errors propagate; the entry point maps them to exit codes.
"""
import logging
from pathlib import Path
from typing import Callable, Dict

import numpy as np

from affine_vlab.core.config import settings
from affine_vlab.core.errors import ConfigValidationError, VerifyFailure
from affine_vlab.numerics.affine_energy import energy
from affine_vlab.numerics.constants import bubble, sharp_constants
from affine_vlab.numerics.fields import ScalarField, band_limited_field, bump
from affine_vlab.numerics.geometry import build_grid
from affine_vlab.numerics.quadrature import directions
from affine_vlab.schemas.constants import ExtremalBubble
from affine_vlab.schemas.reports import CheckReport, EnergyReport
from affine_vlab.schemas.run_config import RunConfig
from affine_vlab.solvers.grid import build_quotient, least_energy, principal_eigen
from affine_vlab.solvers.radial import radial_principal_eigen, scan_lambda
from affine_vlab.solvers.witness import lambda_star_from, witness_quotient
from affine_vlab.utils.storage import dump_field, load_field, write_csv, write_pgm, write_png
from affine_vlab.utils.validators import critical_exponent
from affine_vlab.verify.suite import all_passed, format_report, run_suite

logger = logging.getLogger(__name__)

RESOLVED_CONFIG = "resolved_config.txt"


def _csv(cfg: RunConfig, out: Path, name: str, columns, rows) -> Path:
    return write_csv(out / name, columns, rows, timestamp=cfg.timestamp)


def _trace_rows(trace):
    return [(k, level) for k, level in enumerate(trace)]


def _direction_count(cfg: RunConfig, dim: int) -> int:
    if cfg.m is not None:
        return cfg.m
    return settings.DEFAULT_DIRECTIONS_2D if dim == 2 else settings.DEFAULT_DIRECTIONS_3D


def generate_field(cfg: RunConfig) -> ScalarField:
    """Field named by ``source`` on the configured domain."""
    spec = cfg.domain_spec()
    if cfg.source == "eigen":
        return principal_eigen(cfg.solve_config()).eigenfunction
    if cfg.source == "solve":
        if cfg.q is None:
            raise ConfigValidationError("source = solve needs q")
        return least_energy(cfg.solve_config(q=cfg.q)).rescaled_solution

    dom = build_grid(spec, cfg.h)
    center = np.asarray(spec.center, dtype=float)
    if cfg.source == "bump":
        radius = spec.radius if spec.kind == "ball" else float(min(spec.half_axes or [cfg.radius]))
        return bump(dom, center=center, radius=radius)
    if cfg.source == "random":
        return band_limited_field(dom, np.random.default_rng(cfg.seed))
    e = ExtremalBubble(a=cfg.bubble_a, b=cfg.bubble_b, x0=list(center))
    return ScalarField.from_function(dom, lambda x: bubble(e, dom.dim, cfg.p, x))


# ==================== Commands ====================

def run_constants(cfg: RunConfig, out: Path) -> int:
    table = sharp_constants(cfg.n, cfg.p)
    _csv(cfg, out, "constants.csv", ["name", "value"], table.to_rows())
    return 0


def run_energy(cfg: RunConfig, out: Path) -> int:
    u = load_field(cfg.field) if cfg.field else generate_field(cfg)
    ds = directions(u.dom.dim, _direction_count(cfg, u.dom.dim))
    report = energy(u, ds, cfg.p)
    _csv(cfg, out, "energy.csv", EnergyReport.columns(), [report.to_row()])
    psi_rows = [(j, *xi, w, v) for j, (xi, w, v) in enumerate(zip(ds.directions, ds.weights, report.psi))]
    axes = ["x", "y", "z"][: ds.dim]
    _csv(cfg, out, "psi.csv", ["j", *[f"xi_{a}" for a in axes], "weight", "psi"], psi_rows)
    logger.info(f"[Energy] E={report.energy:.12g} grad_norm={report.grad_norm:.12g} degenerate={report.degenerate}")
    return 0


def run_eigen(cfg: RunConfig, out: Path) -> int:
    solve_cfg = cfg.solve_config()
    result = principal_eigen(solve_cfg)
    row = {
        "energy_kind": result.energy_kind,
        "eigenvalue": result.eigenvalue,
        "seed_index": result.seed_index,
        "alternates": len(result.alternates),
        "iterations": len(result.trace) - 1,
        "converged": result.converged,
    }
    spec = cfg.domain_spec()
    if spec.kind == "ball" and 1 < cfg.p < cfg.n:
        quotient = build_quotient(solve_cfg, q=cfg.p, lam=0.0)
        p_star = critical_exponent(cfg.n, cfg.p)
        phi = result.eigenfunction
        norm_p = quotient.power_integral(phi, cfg.p) ** (1.0 / cfg.p)
        norm_c = quotient.power_integral(phi, p_star) ** (1.0 / p_star)
        row["lambda_star"] = lambda_star_from(result.eigenvalue, norm_p, norm_c, cfg.n, cfg.p)
    if cfg.q is not None:
        witness_cfg = cfg.solve_config(q=cfg.q)
        row["witness"] = witness_quotient(result, witness_cfg, cfg.lambda_)

    _csv(cfg, out, "eigen.csv", list(row), [list(row.values())])
    _csv(cfg, out, "eigen_trace.csv", ["iteration", "level"], _trace_rows(result.trace))
    dump_field(result.eigenfunction, out / "eigenfunction.field")
    return 0


def run_solve(cfg: RunConfig, out: Path) -> int:
    result = least_energy(cfg.solve_config(q=cfg.q))
    columns = ["level", "mu", "rescale", "el_residual", "positivity_fraction", "positivity_ok", "seed_index", "alternates"]
    mu = "" if result.mu is None else result.mu
    row = [result.level, mu, result.rescale, result.el_residual, result.positivity_fraction,
           result.positivity_ok, result.seed_index, len(result.alternates)]
    _csv(cfg, out, "solve.csv", columns, [row])
    _csv(cfg, out, "solve_trace.csv", ["iteration", "level"], _trace_rows(result.trace))
    dump_field(result.minimizer, out / "minimizer.field")
    dump_field(result.rescaled_solution, out / "solution.field")
    if not result.positivity_ok:
        logger.warning(f"[Solve] only {result.positivity_fraction:.4f} of interior nodes are positive")
    return 0


def run_scan(cfg: RunConfig, out: Path) -> int:
    spec = cfg.domain_spec()
    if spec.kind != "ball":
        raise ConfigValidationError("scan-lambda runs the radial solver and needs domain = ball")
    lam1 = radial_principal_eigen(cfg.n, cfg.p, spec.radius, cfg.nodes).level
    upper = cfg.lambda_max if cfg.lambda_max is not None else 0.9 * lam1
    lambdas = np.linspace(cfg.lambda_min, upper, cfg.lambda_count)
    rows = scan_lambda(cfg.n, cfg.p, lambdas, spec.radius, cfg.nodes)
    _csv(cfg, out, "scan.csv", ["lambda", "level", "below_K_threshold"],
         [(r["lambda"], r["level"], r["below_K_threshold"]) for r in rows])
    logger.info(f"[Scan] radial lambda_1 = {lam1:.12g}")
    return 0


def run_verify(cfg: RunConfig, out: Path) -> int:
    reports = run_suite(cfg.level, cfg.seed, only=cfg.checks, corrupt=cfg.corrupt)
    _csv(cfg, out, "verify.csv", CheckReport.columns(), [r.to_row() for r in reports])
    text = format_report(reports)
    (out / "verify.txt").write_text(text + "\n", encoding="utf-8")
    print(text)
    if not all_passed(reports):
        failed = [r.name for r in reports if not r.passed]
        raise VerifyFailure(f"{len(failed)} check(s) failed: {', '.join(failed)}")
    return 0


def run_dump_field(cfg: RunConfig, out: Path) -> int:
    dump_field(generate_field(cfg), out / f"{cfg.source}.field")
    return 0


def run_heatmap(cfg: RunConfig, out: Path) -> int:
    u = load_field(cfg.field)
    stem = Path(cfg.field).stem
    if cfg.heatmap_format == "png":
        write_png(u, out / f"{stem}.png")
    else:
        write_pgm(u, out / f"{stem}.pgm")
    return 0


COMMAND_HANDLERS: Dict[str, Callable[[RunConfig, Path], int]] = {
    "constants": run_constants,
    "energy": run_energy,
    "eigen": run_eigen,
    "solve": run_solve,
    "scan-lambda": run_scan,
    "verify": run_verify,
    "dump-field": run_dump_field,
    "heatmap": run_heatmap,
}


def run(cfg: RunConfig) -> int:
    """
    Dispatch one configured command.

    Writes the resolved config next to the outputs before running.

    Raises:
        ConfigValidationError: no command configured
        AffineVlabError subclasses from the command
    """
    if cfg.command is None:
        raise ConfigValidationError("no command given")
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / RESOLVED_CONFIG).write_text(cfg.to_text())
    logger.info(f"[CLI] running {cfg.command} into {out}")
    return COMMAND_HANDLERS[cfg.command](cfg, out)
