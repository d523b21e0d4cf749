"""
Closed-form constants and the extremal family.

- omega(k): volume of the unit ball in R^k
- alpha_np(n, p): normalization of the affine energy
- k_np(n, p): sharp affine Sobolev constant (equal to the classical one)
- talenti_constant(n, p): classical sharp Sobolev constant via the Beta function
- bubble / bubble_sobolev_ratio: extremal functions and their truncations
"""
import logging
import math
from typing import Optional

import numpy as np
from scipy import integrate, special

from affine_vlab.core.errors import OutOfRange
from affine_vlab.schemas.constants import ExtremalBubble, SharpConstants
from affine_vlab.utils.validators import critical_exponent

logger = logging.getLogger(__name__)


def omega(k: float) -> float:
    """Volume of the unit ball, pi^{k/2} / Gamma(k/2 + 1)."""
    if k < 0:
        raise OutOfRange(f"omega needs k >= 0, got {k}")
    return float(math.pi ** (k / 2.0) / special.gamma(k / 2.0 + 1.0))


def sphere_measure(n: int) -> float:
    """Total surface measure n * omega_n of S^{n-1}."""
    return n * omega(n)


def alpha_np(n: int, p: float) -> float:
    """(2 w_{n+p-2})^{-1/p} (n w_n w_{p-1})^{1/p} (n w_n)^{1/n}."""
    if n < 2 or p < 1:
        raise OutOfRange(f"alpha_np needs n >= 2 and p >= 1, got n={n}, p={p}")
    return float(
        (2.0 * omega(n + p - 2)) ** (-1.0 / p)
        * (n * omega(n) * omega(p - 1)) ** (1.0 / p)
        * (n * omega(n)) ** (1.0 / n)
    )


def k_np(n: int, p: float) -> float:
    """
    Sharp constant of the affine Sobolev inequality.

    Args:
        n: Dimension
        p: Exponent, 1 <= p < n

    Returns:
        K_{n,1} for p = 1, otherwise the Gamma closed form for 1 < p < n

    Raises:
        OutOfRange: p >= n or p < 1
    """
    if not 1 <= p < n:
        raise OutOfRange(f"k_np needs 1 <= p < n, got n={n}, p={p}")
    if p == 1:
        return float(math.pi ** -0.5 / n * special.gamma(n / 2.0 + 1.0) ** (1.0 / n))

    # Gamma products in log form to stay finite for large n
    log_ratio = (
        special.gammaln(n / 2.0 + 1.0) + special.gammaln(n)
        - special.gammaln(n + 1.0 - n / p) - special.gammaln(n / p)
    )
    return float(
        math.pi ** -0.5
        * n ** (-1.0 / p)
        * ((p - 1.0) / (n - p)) ** (1.0 - 1.0 / p)
        * math.exp(log_ratio / n)
    )


def talenti_constant(n: int, p: float) -> float:
    """Classical sharp Sobolev constant written with omega_n and the Beta function."""
    if not 1 < p < n:
        raise OutOfRange(f"talenti_constant needs 1 < p < n, got n={n}, p={p}")
    m = n / p
    return float(
        n ** (-1.0 / p)
        * ((p - 1.0) / (n - p)) ** (1.0 - 1.0 / p)
        * (omega(n) * (n - m) * special.beta(m, n - m)) ** (-1.0 / n)
    )


def mu_critical(n: int, p: float) -> float:
    """Poincare-Sobolev constant at the critical exponent, 1 / K_{n,p}."""
    return 1.0 / k_np(n, p)


def critical_lower_bound(n: int, p: float, lam: float, lam1: float) -> float:
    """Lower bound K^{-p} * min(1, 1 - lam/lam1) for the critical level."""
    if lam1 <= 0:
        raise OutOfRange(f"principal eigenvalue must be positive, got {lam1}")
    return k_np(n, p) ** (-p) * min(1.0, 1.0 - lam / lam1)


def sharp_constants(n: int, p: float) -> SharpConstants:
    """All constants for (n, p) in one record."""
    table = [omega(k) for k in range(int(math.floor(n + p)) + 1)]
    k_value: Optional[float] = None
    talenti: Optional[float] = None
    mu: Optional[float] = None
    if 1 < p < n:
        k_value = k_np(n, p)
        talenti = talenti_constant(n, p)
        mu = 1.0 / k_value
    elif p == 1:
        k_value = k_np(n, p)
    return SharpConstants(
        n=n, p=p, alpha_np=alpha_np(n, p), k_np=k_value, talenti=talenti, mu_critical=mu, omega_table=table
    )


# ==================== Extremal family ====================

def bubble(e: ExtremalBubble, n: int, p: float, x) -> np.ndarray:
    """
    Evaluate a(1 + b|A(x - x0)|^{p/(p-1)})^{-(n-p)/p}.

    x may be a single point or an array of points with the coordinate on the
    last axis.
    """
    if not 1 < p < n:
        raise OutOfRange(f"bubble needs 1 < p < n, got n={n}, p={p}")
    pts = np.asarray(x, dtype=float)
    rel = (pts - np.asarray(e.x0, dtype=float)) @ e.matrix.T
    r = np.linalg.norm(rel, axis=-1)
    return e.a * (1.0 + e.b * r ** (p / (p - 1.0))) ** (-(n - p) / p)


def _unit_profile(s, n, p):
    return (1.0 + s ** (p / (p - 1.0))) ** (-(n - p) / p)


def _unit_profile_slope(s, n, p):
    q = p / (p - 1.0)
    return -(n - p) / p * (1.0 + s ** q) ** (-(n - p) / p - 1.0) * q * s ** (q - 1.0)


def bubble_sobolev_ratio(n: int, p: float, b: float, R: float = 1.0) -> float:
    """
    Sobolev quotient of the truncated bubble w = (U_b - U_b(R))_+ on the ball B_R.

    Returns ||grad w||_p^p / ||w||_{p*}^p, which decreases to K_{n,p}^{-p}
    as b grows. The quotient is dilation invariant, so it is evaluated on the
    unit-scale profile truncated at S = R * b^{(p-1)/p}.
    """
    if not 1 < p < n:
        raise OutOfRange(f"bubble_sobolev_ratio needs 1 < p < n, got n={n}, p={p}")
    if b <= 0 or R <= 0:
        raise OutOfRange("b and R must be positive")

    p_star = critical_exponent(n, p)
    S = R * b ** ((p - 1.0) / p)
    floor = _unit_profile(S, n, p)
    breaks = [x for x in (1.0, 10.0, 100.0) if x < S]

    grad, _ = integrate.quad(
        lambda s: s ** (n - 1) * abs(_unit_profile_slope(s, n, p)) ** p, 0.0, S, points=breaks or None, limit=400
    )
    mass, _ = integrate.quad(
        lambda s: s ** (n - 1) * max(_unit_profile(s, n, p) - floor, 0.0) ** p_star,
        0.0, S, points=breaks or None, limit=400,
    )
    area = sphere_measure(n)
    ratio = area * grad / (area * mass) ** (p / p_star)
    logger.debug(f"[Constants] bubble ratio n={n} p={p} b={b:g}: {ratio:.8g}")
    return float(ratio)
