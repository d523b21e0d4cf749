"""
Direction sets on the unit sphere.

- n = 2: m equally spaced angles with weights 2*pi/m
- n = 3: product rule, Gauss-Legendre in cos(theta) times uniform azimuths.
  L = ceil(sqrt(m/2)) polar nodes and 2L azimuths give 2L^2 >= m nodes;
  the set is closed under xi -> -xi and all weights are positive.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from affine_vlab.core.errors import BadCount, OutOfRange
from affine_vlab.numerics.constants import alpha_np, sphere_measure

logger = logging.getLogger(__name__)

MIN_DIRECTIONS = 4


@dataclass(frozen=True, eq=False)
class DirectionSet:
    """Quadrature nodes xi_j on S^{n-1} with weights w_j approximating d sigma."""

    dim: int
    directions: np.ndarray
    weights: np.ndarray
    rule: str

    def __post_init__(self):
        self.directions.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def size(self) -> int:
        return len(self.weights)

    def key(self) -> tuple:
        """Identity used to reject mixing rules within one computation."""
        return (self.dim, self.rule, self.size)


def directions(n: int, m: int) -> DirectionSet:
    """
    Build a direction set.

    Args:
        n: Dimension (2 or 3)
        m: Requested node count (>= 4); the 3D rule rounds up

    Returns:
        DirectionSet with weights summing to n * omega_n

    Raises:
        BadCount: m below the minimum
    """
    if n not in (2, 3):
        raise OutOfRange(f"direction sets exist for n = 2 or 3, got {n}")
    if m < MIN_DIRECTIONS:
        raise BadCount(f"need at least {MIN_DIRECTIONS} directions, got {m}")

    if n == 2:
        theta = 2.0 * math.pi * np.arange(m) / m
        xi = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        w = np.full(m, 2.0 * math.pi / m)
        return DirectionSet(dim=2, directions=xi, weights=w, rule=f"uniform-{m}")

    L = int(math.ceil(math.sqrt(m / 2.0)))
    z, wz = special.roots_legendre(L)
    phi = 2.0 * math.pi * (np.arange(2 * L) + 0.5) / (2 * L)
    zz, pp = np.meshgrid(z, phi, indexing="ij")
    sin_t = np.sqrt(1.0 - zz ** 2)
    xi = np.stack([sin_t * np.cos(pp), sin_t * np.sin(pp), zz], axis=-1).reshape(-1, 3)
    w = np.repeat(wz * (math.pi / L), 2 * L)
    logger.debug(f"[Quadrature] 3D product rule L={L}: {len(w)} nodes for m={m}")
    return DirectionSet(dim=3, directions=xi, weights=w, rule=f"gauss-product-{L}")


def moment_integral(ds: DirectionSet, p: float, xi0) -> float:
    """Sum_j w_j |xi0 . xi_j|^p (approximates the sphere integral)."""
    v = np.asarray(xi0, dtype=float)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise OutOfRange("xi0 must be a unit vector")
    v = v / norm
    return float(np.sum(ds.weights * np.abs(ds.directions @ v) ** p))


def alpha_via_moment(ds: DirectionSet, p: float) -> float:
    """alpha_{n,p} from (n w_n)^{(n+p)/(np)} * moment^{-1/p}."""
    n = ds.dim
    xi0 = np.zeros(n)
    xi0[0] = 1.0
    return float(sphere_measure(n) ** ((n + p) / (n * p)) * moment_integral(ds, p, xi0) ** (-1.0 / p))


def alpha_consistency(n: int, p: float, m: int) -> float:
    """Relative error between the quadrature and closed-form values of alpha_{n,p}."""
    exact = alpha_np(n, p)
    return abs(alpha_via_moment(directions(n, m), p) - exact) / exact
