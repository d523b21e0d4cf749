"""
Diagnostics built on computed eigenfunctions and radial solutions.

- lambda_star: lambda^A - K^{-p} ||phi||_{p*}^p / ||phi||_p^p
- nonexistence_witness: the quotient at the principal eigenfunction,
  (lambda^A - lambda) ||phi||_p^p / ||phi||_q^p
- pohozaev_residual: mismatch between the boundary flux and volume terms
  of the Pohozaev identity for a radial solution on a ball
- critical_radial_existence: whether the critical radial problem has a
  positive solution, from the level and the Pohozaev obstruction
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from affine_vlab.core.errors import NotRadial, OutOfRange
from affine_vlab.numerics.constants import k_np, sphere_measure
from affine_vlab.numerics.fields import ScalarField, radial_profile
from affine_vlab.schemas.domain import DomainSpec
from affine_vlab.schemas.reports import EigenResult
from affine_vlab.schemas.solve import SolveConfig
from affine_vlab.solvers.grid import build_quotient, principal_eigen
from affine_vlab.solvers.radial import RadialMesh, RadialSolution, radial_level, radial_principal_eigen
from affine_vlab.utils.validators import critical_exponent

logger = logging.getLogger(__name__)

# Relative radial-profile scatter above which a grid field is not radial
RADIAL_SCATTER_MAX = 0.05
RESIDUAL_FLOOR = 1e-14


# ==================== lambda_* ====================

def lambda_star_from(eigenvalue: float, norm_p: float, norm_critical: float, n: int, p: float) -> float:
    """Formula value from the eigenvalue and the two norms of the eigenfunction."""
    return float(eigenvalue - k_np(n, p) ** (-p) * (norm_critical / norm_p) ** p)


def lambda_star(n: int, p: float, ball: Optional[DomainSpec] = None, mode: str = "grid",
                h: float = 0.05, nodes: int = 2000, cfg: Optional[SolveConfig] = None) -> float:
    """
    lambda_* on a ball.

    mode="grid" (default) runs the full-grid affine eigen solve, so
    lambda^A and phi are the affine principal pair (cfg overrides the grid
    parameters). mode="radial" restricts to radial profiles, where the
    affine energy equals the gradient norm; it is the fast 1D estimate used
    for refinement studies. Both evaluate the scale-invariant form, so the
    eigenfunction normalization is irrelevant.
    """
    ball = ball or DomainSpec.ball_domain(n, 1.0)
    if ball.kind != "ball":
        raise OutOfRange("lambda_star is defined on balls")
    p_star = critical_exponent(n, p)

    if mode == "radial":
        eig = radial_principal_eigen(n, p, ball.radius, nodes)
        ug = eig.mesh.at_gauss(eig.profile)
        norm_p = eig.mesh.integral(np.abs(ug) ** p) ** (1.0 / p)
        norm_c = eig.mesh.integral(np.abs(ug) ** p_star) ** (1.0 / p_star)
        value = lambda_star_from(eig.level, norm_p, norm_c, n, p)
    elif mode == "grid":
        cfg = cfg or SolveConfig(p=p, domain=ball, h=h)
        eig = principal_eigen(cfg)
        quotient = build_quotient(cfg, q=p, lam=0.0)
        phi = eig.eigenfunction
        norm_p = quotient.power_integral(phi, p) ** (1.0 / p)
        norm_c = quotient.power_integral(phi, p_star) ** (1.0 / p_star)
        value = lambda_star_from(eig.eigenvalue, norm_p, norm_c, n, p)
    else:
        raise OutOfRange(f"unknown lambda_star mode {mode!r}")

    logger.info(f"[LambdaStar] n={n} p={p} mode={mode}: lambda_* = {value:.12g}")
    return value


# ==================== Nonexistence witness ====================

def witness_quotient(eig: EigenResult, cfg: SolveConfig, lam: float) -> float:
    """Q(phi) = (E^p(phi) - lam ||phi||_p^p) / ||phi||_q^p at the eigenfunction."""
    q = cfg.q if cfg.q is not None else cfg.p
    quotient = build_quotient(cfg, q=q, lam=lam)
    phi = eig.eigenfunction
    phi = phi.scaled(1.0 / quotient.power_integral(phi, q) ** (1.0 / q))
    return float(quotient.level(phi))


def nonexistence_witness(cfg: SolveConfig, eig: Optional[EigenResult] = None) -> float:
    """
    Quotient value at the principal eigenfunction with ||phi||_q = 1.

    A value <= 0 certifies that the least-energy level is not positive.
    """
    if eig is None:
        eig = principal_eigen(cfg)
    value = witness_quotient(eig, cfg, cfg.lambda_)
    logger.info(f"[Witness] lambda={cfg.lambda_} lambda^A={eig.eigenvalue:.12g}: Q(phi) = {value:.6g}")
    return value


# ==================== Pohozaev ====================

def pohozaev_coefficient(n: int, p: float, q: Optional[float] = None) -> Fraction:
    """
    (n - p)/p - n/q in exact rational arithmetic; q defaults to p*.

    Zero at the critical exponent.
    """
    p_frac = Fraction(p).limit_denominator(10 ** 6)
    if q is None:
        q_frac = n * p_frac / (n - p_frac)
    else:
        q_frac = Fraction(q).limit_denominator(10 ** 6)
    return (n - p_frac) / p_frac - n / q_frac


@dataclass
class PohozaevReport:
    lhs: float
    rhs: float
    residual: float
    coefficient: Fraction


def _as_radial(u: Union[RadialSolution, ScalarField], n: int, R: float, nodes: int) -> np.ndarray:
    """Profile values on a uniform mesh of [0, R]."""
    if isinstance(u, RadialSolution):
        if u.solution is None:
            raise NotRadial("radial solution carries no rescaled profile")
        return u.solution
    radii, means, scatter = radial_profile(u)
    if not np.isfinite(scatter) or scatter > RADIAL_SCATTER_MAX:
        raise NotRadial(f"radial-profile scatter {scatter:.3g} exceeds {RADIAL_SCATTER_MAX}")
    r = np.linspace(0.0, R, nodes)
    return np.interp(r, np.append(radii, R), np.append(means, 0.0))


def pohozaev_residual(u: Union[RadialSolution, ScalarField], n: int, p: float, q: float,
                      lam: float, R: float = 1.0, nodes: int = 2000) -> PohozaevReport:
    """
    Residual of the Pohozaev identity on B_R.

    LHS = (1/p - 1) |u'(R)|^p * R * |dB_R|, the boundary term with x.nu = R
    and H_u^p(grad u) = |u'(R)|^p on the sphere.
    RHS = (n/p - 1) int u f(u) - n int F(u), f(t) = t^{q-1} + lam t^{p-1}.

    Raises:
        NotRadial: zero input or a grid field that is not radial
    """
    values = _as_radial(u, n, R, nodes)
    if not np.any(np.abs(values) > 0):
        raise NotRadial("zero field has no Pohozaev identity to check")
    mesh = u.mesh if isinstance(u, RadialSolution) else RadialMesh(n, R, len(values))

    slope = mesh.slope_at_boundary(values)
    boundary_area = sphere_measure(n) * R ** (n - 1)
    lhs = (1.0 / p - 1.0) * abs(slope) ** p * R * boundary_area

    ug = np.abs(mesh.at_gauss(values))
    u_f = ug ** q + lam * ug ** p
    big_f = ug ** q / q + lam * ug ** p / p
    rhs = (n / p - 1.0) * mesh.integral(u_f) - n * mesh.integral(big_f)

    residual = abs(lhs - rhs) / max(abs(lhs), abs(rhs), RESIDUAL_FLOOR)
    coefficient = pohozaev_coefficient(n, p, q)
    logger.info(f"[Pohozaev] n={n} p={p} q={q} lam={lam}: lhs={lhs:.8g} rhs={rhs:.8g} residual={residual:.3e}")
    return PohozaevReport(lhs=lhs, rhs=rhs, residual=residual, coefficient=coefficient)


# ==================== Critical exponent on the ball ====================

# Relative margin below K^{-p} that counts as a level strictly under the threshold
LEVEL_SLACK = 1e-3


@dataclass
class CriticalExistenceReport:
    """Evidence for or against a positive radial solution at q = p*."""

    n: int
    p: float
    lam: float
    level: float
    threshold: float
    coefficient: Fraction
    boundary_slope: float
    pohozaev: PohozaevReport

    @property
    def below_threshold(self) -> bool:
        return self.level < self.threshold * (1.0 - LEVEL_SLACK)

    @property
    def pohozaev_obstruction(self) -> bool:
        """Zero volume coefficient with lam <= 0 forces u'(R) = 0, which no positive solution has."""
        return self.coefficient == 0 and self.lam <= 0

    @property
    def positive_solution(self) -> bool:
        return self.below_threshold and not self.pohozaev_obstruction


def critical_radial_existence(n: int, p: float, lam: float = 0.0, R: float = 1.0,
                              nodes: int = 2000) -> CriticalExistenceReport:
    """
    Decide whether the critical radial problem on B_R has a positive solution.

    The radial critical minimizer is rescaled into a candidate solution and
    fed to the Pohozaev identity. At lam = 0 the volume side vanishes
    identically, so the nonzero boundary slope of the candidate leaves a
    residual near 1 and the level stays at K^{-p}: the infimum is not
    attained and no positive solution is reported.
    """
    q = critical_exponent(n, p)
    candidate = radial_level(n, p, q, lam, R, nodes)
    report = pohozaev_residual(candidate, n, p, q, lam, R, nodes)
    result = CriticalExistenceReport(
        n=n,
        p=p,
        lam=lam,
        level=candidate.level,
        threshold=k_np(n, p) ** (-p),
        coefficient=report.coefficient,
        boundary_slope=candidate.mesh.slope_at_boundary(candidate.solution),
        pohozaev=report,
    )
    if not result.positive_solution:
        logger.warning(
            f"[Critical] n={n} p={p} lam={lam}: no converged positive radial solution "
            f"(level={result.level:.8g}, K^-p={result.threshold:.8g}, pohozaev residual={report.residual:.3g})"
        )
    else:
        logger.info(f"[Critical] n={n} p={p} lam={lam}: level {result.level:.8g} below K^-p, solution attained")
    return result
