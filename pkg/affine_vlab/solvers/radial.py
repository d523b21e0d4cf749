"""
Radial problems on the ball B_R.

Profiles are continuous piecewise-linear on a uniform mesh of [0, R] with
u(R) = 0; u'(0) = 0 is natural. The gradient term is integrated exactly
(piecewise-constant slope against r^{n-1}); |u|^q and |u|^p use five Gauss
points per element. For radial functions the affine energy equals the
classical gradient norm, so these quotients are affine levels restricted to
radial fields.

Minimization: scipy L-BFGS-B with u >= 0.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy import optimize
from scipy.special import roots_legendre

from affine_vlab.core.errors import NonPositiveLevel, NoConvergence, OutOfRange
from affine_vlab.numerics.constants import k_np, sphere_measure
from affine_vlab.utils.validators import critical_exponent

logger = logging.getLogger(__name__)

DEFAULT_NODES = 2000
GAUSS_POINTS = 5


@dataclass
class RadialMesh:
    """Uniform mesh of [0, R] with per-element Gauss data."""

    n: int
    R: float
    nodes: int

    def __post_init__(self):
        if self.nodes < 3:
            raise OutOfRange("radial mesh needs at least 3 nodes")
        self.r = np.linspace(0.0, self.R, self.nodes)
        self.dr = self.R / (self.nodes - 1)
        area = sphere_measure(self.n)
        # Exact shell weights for the piecewise-constant slope
        self.shell = area * (self.r[1:] ** self.n - self.r[:-1] ** self.n) / self.n
        z, w = roots_legendre(GAUSS_POINTS)
        t = 0.5 * (z + 1.0)
        self.t = t
        rq = self.r[:-1, None] + self.dr * t[None, :]
        self.gauss_weight = area * 0.5 * self.dr * w[None, :] * rq ** (self.n - 1)

    def full(self, free: np.ndarray) -> np.ndarray:
        """Append the boundary value u(R) = 0."""
        return np.append(free, 0.0)

    def at_gauss(self, u: np.ndarray) -> np.ndarray:
        return u[:-1, None] * (1.0 - self.t) + u[1:, None] * self.t

    def gauss_transpose(self, c: np.ndarray) -> np.ndarray:
        out = np.zeros(self.nodes)
        out[:-1] += np.sum(c * (1.0 - self.t), axis=1)
        out[1:] += np.sum(c * self.t, axis=1)
        return out

    # ==================== Integrals ====================

    def gradient_term(self, u: np.ndarray, p: float) -> Tuple[float, np.ndarray]:
        """(n w_n int r^{n-1} |u'|^p dr, gradient w.r.t. nodal values)."""
        slope = np.diff(u) / self.dr
        value = float(np.sum(self.shell * np.abs(slope) ** p))
        flux = self.shell * p * np.sign(slope) * np.abs(slope) ** (p - 1.0) / self.dr
        grad = np.zeros(self.nodes)
        grad[1:] += flux
        grad[:-1] -= flux
        return value, grad

    def power_term(self, u: np.ndarray, e: float) -> Tuple[float, np.ndarray]:
        """(n w_n int r^{n-1} |u|^e dr, gradient)."""
        ug = self.at_gauss(u)
        value = float(np.sum(self.gauss_weight * np.abs(ug) ** e))
        grad = self.gauss_transpose(self.gauss_weight * e * np.sign(ug) * np.abs(ug) ** (e - 1.0))
        return value, grad

    def integral(self, values_at_gauss: np.ndarray) -> float:
        return float(np.sum(self.gauss_weight * values_at_gauss))

    def slope_at_boundary(self, u: np.ndarray) -> float:
        """Second-order one-sided derivative u'(R)."""
        return float((3.0 * u[-1] - 4.0 * u[-2] + u[-3]) / (2.0 * self.dr))


@dataclass
class RadialSolution:
    """Normalized radial minimizer (||u||_q = 1), its level and the rescaled solution."""

    n: int
    p: float
    q: float
    lam: float
    R: float
    r: np.ndarray
    profile: np.ndarray
    level: float
    solution: Optional[np.ndarray]
    converged: bool
    iterations: int
    mesh: RadialMesh

    @property
    def rescale(self) -> float:
        return float(self.level ** (1.0 / (self.q - self.p)))


def _check_exponents(n: int, p: float) -> None:
    if n < 2 or not 1 < p < n:
        raise OutOfRange(f"radial solvers need 1 < p < n, got n={n}, p={p}")


def _initial_profile(mesh: RadialMesh) -> np.ndarray:
    return np.cos(0.5 * np.pi * mesh.r[:-1] / mesh.R)


def minimize_radial_quotient(mesh: RadialMesh, p: float, q: float, lam: float,
                             x0: Optional[np.ndarray] = None, max_iter: int = 20000,
                             tag: str = "Radial") -> Tuple[np.ndarray, float, int]:
    """
    Minimize (G(u) - lam B(u)) / N(u)^{p/q} over nonnegative profiles.

    Returns:
        (normalized free nodal values, level, iterations)

    Raises:
        NoConvergence: iteration limit reached
    """
    def objective(x):
        u = mesh.full(x)
        g, dg = mesh.gradient_term(u, p)
        b, db = mesh.power_term(u, p)
        nq, dn = mesh.power_term(u, q)
        top = g - lam * b
        scale = nq ** (-p / q)
        level = top * scale
        grad = scale * (dg - lam * db) - (p / q) * level / nq * dn
        return level, grad[:-1]

    start = _initial_profile(mesh) if x0 is None else np.asarray(x0, dtype=float)
    result = optimize.minimize(
        objective,
        start,
        jac=True,
        method="L-BFGS-B",
        bounds=[(0.0, None)] * len(start),
        options={"maxiter": max_iter, "maxfun": 2 * max_iter, "ftol": 1e-12, "gtol": 1e-10},
    )
    if result.status == 1:
        raise NoConvergence(f"{tag}: L-BFGS-B hit the iteration limit ({max_iter})", level=float(result.fun))
    if result.status == 2:
        logger.warning(f"[{tag}] L-BFGS-B stopped early: {result.message}")

    x = result.x
    x = x / mesh.power_term(mesh.full(x), q)[0] ** (1.0 / q)
    logger.debug(f"[{tag}] level={result.fun:.12g} after {result.nit} iterations")
    return x, float(result.fun), int(result.nit)


# ==================== Operations ====================

def radial_principal_eigen(n: int, p: float, R: float = 1.0, nodes: int = DEFAULT_NODES) -> RadialSolution:
    """Radial principal eigenvalue and L^p-normalized eigenfunction on B_R."""
    _check_exponents(n, p)
    mesh = RadialMesh(n, R, nodes)
    x, level, nit = minimize_radial_quotient(mesh, p, p, 0.0, tag="Radial eigen")
    logger.info(f"[Radial eigen] n={n} p={p} R={R}: lambda_1 = {level:.12g}")
    return RadialSolution(n, p, p, 0.0, R, mesh.r, mesh.full(x), level, None, True, nit, mesh)


def radial_level(n: int, p: float, q: float, lam: float = 0.0, R: float = 1.0,
                 nodes: int = DEFAULT_NODES, x0: Optional[np.ndarray] = None) -> RadialSolution:
    """
    Radial least-energy level for p < q <= p*.

    Raises:
        OutOfRange: exponents outside the admissible range
        NonPositiveLevel: level <= 0
        NoConvergence
    """
    _check_exponents(n, p)
    p_star = critical_exponent(n, p)
    if not p < q <= p_star * (1 + 1e-12):
        raise OutOfRange(f"q must satisfy p < q <= p* = {p_star:.17g}, got {q}")
    mesh = RadialMesh(n, R, nodes)
    x, level, nit = minimize_radial_quotient(mesh, p, q, lam, x0=x0, tag="Radial level")
    if level <= 0:
        raise NonPositiveLevel(f"radial level {level:.6g} <= 0 for lambda = {lam}", level=level)
    profile = mesh.full(x)
    solution = profile * level ** (1.0 / (q - p))
    return RadialSolution(n, p, q, lam, R, mesh.r, profile, level, solution, True, nit, mesh)


def radial_critical_level(n: int, p: float, lam: float = 0.0, R: float = 1.0,
                          nodes: int = DEFAULT_NODES, x0: Optional[np.ndarray] = None) -> float:
    """
    Radial level at q = p*, an upper bound for the least energy on the ball.

    At lam = 0 the level is not attained and sits just above K_{n,p}^{-p}.
    """
    return radial_level(n, p, critical_exponent(n, p), lam, R, nodes, x0).level


def scan_lambda(n: int, p: float, lambdas, R: float = 1.0, nodes: int = DEFAULT_NODES) -> List[dict]:
    """
    Critical radial levels over increasing lambda.

    Each solve starts from the previous minimizer, so the levels are
    nonincreasing in lambda. Rows whose level is not positive report 0.

    Returns:
        Rows with keys lambda, level, below_K_threshold
    """
    _check_exponents(n, p)
    threshold = k_np(n, p) ** (-p)
    q = critical_exponent(n, p)
    rows = []
    x0 = None
    for lam in sorted(float(v) for v in lambdas):
        try:
            sol = radial_level(n, p, q, lam, R, nodes, x0=x0)
            level = sol.level
            x0 = sol.profile[:-1]
        except NonPositiveLevel as e:
            level = 0.0
            logger.info(f"[Scan] lambda={lam:.8g}: level not positive ({e})")
        rows.append({"lambda": lam, "level": level, "below_K_threshold": bool(level < threshold)})
        logger.info(f"[Scan] lambda={lam:.8g} level={level:.12g} below K^-p={level < threshold}")
    return rows
