"""
Full-grid variational problems.

- principal_eigen: inf E^p(u) / ||u||_p^p
- least_energy: inf (E^p(u) - lambda ||u||_p^p) / ||u||_q^p, with the
  minimizer rescaled by c^{1/(q-p)} into a solution of the Euler-Lagrange
  equation

Both run a multi-start descent on the worker pool, keep the lowest level
(ties broken by seed index) and take the absolute value at the end.
"""
import logging
from typing import List, Tuple

import numpy as np

from affine_vlab.core.config import settings
from affine_vlab.core.errors import ConfigValidationError, NonPositiveLevel, NoConvergence
from affine_vlab.core.parallel import ordered_map
from affine_vlab.numerics.affine_energy import classical_flux, kernel_flux, kernel_from_psi, psi_from_gradients
from affine_vlab.numerics.fields import ScalarField, band_limited_field, cell_gradient_array
from affine_vlab.numerics.quadrature import directions
from affine_vlab.schemas.reports import EigenResult, SolveResult, rescale_factor
from affine_vlab.schemas.solve import SolveConfig
from affine_vlab.solvers.descent import DescentOptions, descend
from affine_vlab.solvers.problems import GridQuotient
from affine_vlab.workers.restart_tasks import RestartOutcome, build_restart_jobs, run_restart

logger = logging.getLogger(__name__)

# Restarts whose level lies this close to the best are reported as alternates
ALTERNATE_TOL = 1e-6
POSITIVE_FRACTION = 0.99


def build_quotient(cfg: SolveConfig, q: float, lam: float) -> GridQuotient:
    dom = cfg.resolve_grid()
    ds = directions(dom.dim, cfg.directions_count)
    return GridQuotient(dom, ds, cfg.p, q, lam, cfg.energy_kind)


def multi_start(quotient: GridQuotient, cfg: SolveConfig, tag: str) -> Tuple[RestartOutcome, List[Tuple[int, float]]]:
    """Run every restart concurrently; return the best outcome and the alternates."""
    jobs = build_restart_jobs(quotient, cfg)
    outcomes = ordered_map(run_restart, jobs)
    best = min(outcomes, key=lambda o: (o.level, o.seed_index))
    scale = max(abs(best.level), 1e-300)
    alternates = sorted(
        (o.seed_index, o.level) for o in outcomes if abs(o.level - best.level) <= ALTERNATE_TOL * scale
    )
    logger.info(
        f"[{tag}] best level={best.level:.12g} from restart {best.seed_index} ({best.kind}); "
        f"{len(alternates)} restart(s) within {ALTERNATE_TOL:g}"
    )
    if not best.outcome.converged:
        raise NoConvergence(
            f"{tag}: best restart did not reach tol_rel={cfg.tol_rel:g} in {cfg.max_iter} iterations",
            level=best.level,
        )
    return best, alternates


def finalize_nonnegative(quotient: GridQuotient, cfg: SolveConfig, best: RestartOutcome, tag: str) -> Tuple[np.ndarray, float]:
    """
    Replace the minimizer by its absolute value and re-evaluate the level.

    Sign changes inside a cell can raise the discrete level slightly; in
    that case a short polish from |u| follows.
    """
    x = quotient.normalize(np.abs(best.outcome.x))
    level = quotient.level(quotient.field(x))
    if level > best.level + 1e-12 * max(abs(best.level), 1.0):
        logger.warning(f"[{tag}] level rose from {best.level:.12g} to {level:.12g} after |u|; polishing")
        polish = descend(quotient, x, quotient.normalize, DescentOptions.from_config(cfg, max_iter=cfg.polish_iter), tag=tag)
        x = quotient.normalize(np.abs(polish.x))
        level = quotient.level(quotient.field(x))
    return x, level


def positivity_fraction(u: ScalarField) -> float:
    """Share of interior nodes where u is clearly positive."""
    values = u.interior()
    if values.size == 0:
        return 0.0
    threshold = settings.FIELD_ZERO_TOL * max(float(np.max(np.abs(values))), 1e-300)
    return float(np.mean(values > threshold))


# ==================== Principal eigenvalue ====================

def principal_eigen(cfg: SolveConfig) -> EigenResult:
    """
    Principal eigenvalue by multi-start minimization of E^p / ||u||_p^p.

    Args:
        cfg: Solve configuration; q and lambda are ignored

    Returns:
        EigenResult with the L^p-normalized nonnegative eigenfunction

    Raises:
        NoConvergence: best restart hit max_iter
    """
    quotient = build_quotient(cfg, q=cfg.p, lam=0.0)
    tag = "Eigen" if cfg.energy_kind == "affine" else "Eigen/classical"
    best, alternates = multi_start(quotient, cfg, tag)
    x, level = finalize_nonnegative(quotient, cfg, best, tag)
    return EigenResult(
        eigenvalue=max(level, 0.0),
        eigenfunction=quotient.field(x),
        trace=best.outcome.trace,
        energy_kind=cfg.energy_kind,
        seed_index=best.seed_index,
        alternates=alternates,
        converged=best.outcome.converged,
    )


# ==================== Least energy ====================

def least_energy(cfg: SolveConfig) -> SolveResult:
    """
    Least-energy level c and its solution.

    Raises:
        ConfigValidationError: q missing
        NonPositiveLevel: computed level <= 0
        NoConvergence: best restart hit max_iter
    """
    if cfg.q is None:
        raise ConfigValidationError("least_energy needs an exponent q")
    quotient = build_quotient(cfg, q=cfg.q, lam=cfg.lambda_)
    tag = "Solve"
    best, alternates = multi_start(quotient, cfg, tag)
    x, level = finalize_nonnegative(quotient, cfg, best, tag)
    if level <= 0:
        raise NonPositiveLevel(
            f"least-energy level {level:.6g} <= 0: lambda = {cfg.lambda_} is at or above the principal eigenvalue",
            level=level,
        )

    minimizer = quotient.field(x)
    factor = rescale_factor(level, cfg.p, cfg.q)
    solution = minimizer.scaled(factor)
    residual = el_residual(quotient, solution, cfg.seed, cfg.residual_tests)
    fraction = positivity_fraction(minimizer)
    logger.info(
        f"[{tag}] level={level:.12g} rescale={factor:.8g} el_residual={residual:.3e} positive={fraction:.4f}"
    )
    return SolveResult(
        level=level,
        minimizer=minimizer,
        rescaled_solution=solution,
        el_residual=residual,
        trace=best.outcome.trace,
        positivity_fraction=fraction,
        positivity_ok=fraction >= POSITIVE_FRACTION,
        mu=level ** (1.0 / cfg.p) if cfg.lambda_ == 0 else None,
        energy_kind=cfg.energy_kind,
        seed_index=best.seed_index,
        alternates=alternates,
        converged=best.outcome.converged,
        p=cfg.p,
        q=cfg.q,
        lambda_=cfg.lambda_,
    )


def residual_test_fields(dom, seed: int, count: int) -> List[ScalarField]:
    """Fixed seeded bank of smooth sign-changing test fields."""
    children = np.random.SeedSequence([seed, 2718]).spawn(count)
    return [band_limited_field(dom, np.random.default_rng(child)) for child in children]


def el_residual(quotient: GridQuotient, solution: ScalarField, seed: int = 0, count: int = 32) -> float:
    """
    Relative residual of the discrete Euler-Lagrange equation.

    max_phi |<-Delta_p u, phi> - integral f(u) phi| divided by the largest
    magnitude of either term over the bank.
    """
    dom = quotient.dom
    g = cell_gradient_array(dom, solution.values)
    vol = dom.cell_volume
    if quotient.energy_kind == "classical":
        flux = classical_flux(g, vol, quotient.p)
    else:
        kern = kernel_from_psi(psi_from_gradients(g, vol, quotient.ds, quotient.p), quotient.ds, quotient.p)
        flux = kernel_flux(g, vol, kern, quotient.ds)

    diffs, scales = [], []
    for phi in residual_test_fields(dom, seed, count):
        lhs = float(np.sum(flux * cell_gradient_array(dom, phi.values)))
        rhs = quotient.source_pairing(solution, phi)
        diffs.append(abs(lhs - rhs))
        scales.append(max(abs(lhs), abs(rhs)))
    return float(max(diffs) / max(max(scales), 1e-300))
