"""
Affine L^p energy and the kernel of the affine p-Laplacian.

For a field u with cell gradients g_c and directions xi_j (weights w_j):

    Psi_j  = vol * sum_c |g_c . xi_j|^p
    E      = alpha_{n,p} * (sum_j w_j Psi_j^{-n/p})^{-1/n}
    c_j    = alpha^{-n} E^{n+p} Psi_j^{-(n+p)/p} w_j
    H^p(z) = sum_j c_j |xi_j . z|^p

so that vol * sum_c H^p(g_c) = sum_j c_j Psi_j = E^p exactly. The negative
power mean is evaluated with logsumexp. A field with min Psi below
PSI_DEGENERACY is the zero field and has E = 0; kernel operations refuse it.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.special import logsumexp

from affine_vlab.core.config import settings
from affine_vlab.core.errors import DegenerateDirection, GridMismatch, NonFinite
from affine_vlab.core.parallel import chunk_bounds, chunked_sum, ordered_map
from affine_vlab.numerics.constants import alpha_np, sphere_measure
from affine_vlab.numerics.fields import (
    ScalarField,
    cell_gradient_array,
    gradients_transpose,
    require_same_grid,
    truncation_shares,
)
from affine_vlab.numerics.quadrature import DirectionSet
from affine_vlab.schemas.reports import EnergyReport

logger = logging.getLogger(__name__)

# Relative size of the regularization for 1 < p < 2
REG_SCALE = 1e-9


@dataclass(frozen=True, eq=False)
class KernelCoefficients:
    """Discrete measure weights c_j of H_u^p, tied to one DirectionSet."""

    coeffs: np.ndarray
    energy: float
    psi: np.ndarray
    p: float
    rule: tuple

    def h_p(self, zeta: np.ndarray, ds: DirectionSet) -> np.ndarray:
        """H_u^p(zeta) for one vector or an array of vectors (last axis)."""
        check_rule(self, ds)
        return np.abs(np.asarray(zeta) @ ds.directions.T) ** self.p @ self.coeffs

    def h(self, zeta: np.ndarray, ds: DirectionSet) -> np.ndarray:
        return self.h_p(zeta, ds) ** (1.0 / self.p)


@dataclass(frozen=True)
class ComparisonSteps:
    """Quantities of the chain E <= Hoelder bound <= ||grad u||_p."""

    energy: float
    holder_bound: float
    grad_norm: float
    anisotropy: float

    def holds(self, tol: float = 1e-12) -> bool:
        return (
            self.energy <= self.holder_bound * (1 + tol)
            and self.holder_bound <= self.grad_norm * (1 + self.anisotropy + tol)
        )


def check_rule(kern: KernelCoefficients, ds: DirectionSet) -> None:
    if kern.rule != ds.key():
        raise GridMismatch(f"kernel built with rule {kern.rule}, used with {ds.key()}")


# ==================== Psi and energy ====================

def psi_from_gradients(g: np.ndarray, vol: float, ds: DirectionSet, p: float) -> np.ndarray:
    xi = ds.directions
    total = chunked_sum(lambda s, e: np.sum(np.abs(g[s:e] @ xi.T) ** p, axis=0), len(g))
    return vol * total


def psi(u: ScalarField, ds: DirectionSet, p: float) -> np.ndarray:
    """Psi_j = sum_cells vol * |g_cell . xi_j|^p for every direction."""
    _check_dims(u, ds)
    g = cell_gradient_array(u.dom, u.values)
    return psi_from_gradients(g, u.dom.cell_volume, ds, p)


def _log_power_mean(psi_values: np.ndarray, ds: DirectionSet, p: float) -> float:
    """log(sum_j w_j Psi_j^{-n/p})."""
    return float(logsumexp(-(ds.dim / p) * np.log(psi_values), b=ds.weights))


def energy_from_psi(psi_values: np.ndarray, ds: DirectionSet, p: float) -> Tuple[float, bool]:
    """
    Energy from precomputed Psi values.

    Returns:
        (E, degenerate)

    Raises:
        NonFinite: some Psi_j is NaN or infinite
    """
    if not np.all(np.isfinite(psi_values)):
        raise NonFinite("Psi has non-finite entries")
    if np.min(psi_values) < settings.PSI_DEGENERACY:
        return 0.0, True
    log_s = _log_power_mean(psi_values, ds, p)
    return float(alpha_np(ds.dim, p) * math.exp(-log_s / ds.dim)), False


def energy(u: ScalarField, ds: DirectionSet, p: float) -> EnergyReport:
    """
    Affine energy report of u.

    Args:
        u: Field
        ds: Direction set shared with every kernel operation on u
        p: Exponent (p >= 1)

    Returns:
        EnergyReport; degenerate fields report E = 0
    """
    _check_dims(u, ds)
    g = cell_gradient_array(u.dom, u.values)
    values = psi_from_gradients(g, u.dom.cell_volume, ds, p)
    e, degenerate = energy_from_psi(values, ds, p)
    gnorm = float((u.dom.cell_volume * np.sum(np.linalg.norm(g, axis=1) ** p)) ** (1.0 / p))
    return EnergyReport(
        n=ds.dim,
        p=p,
        m=ds.size,
        psi=values.tolist(),
        energy=e,
        grad_norm=gnorm,
        min_psi=float(np.min(values)),
        degenerate=degenerate,
    )


# ==================== Kernel ====================

def kernel_from_psi(psi_values: np.ndarray, ds: DirectionSet, p: float) -> KernelCoefficients:
    if not np.all(np.isfinite(psi_values)):
        raise NonFinite("Psi has non-finite entries")
    min_psi = float(np.min(psi_values))
    if min_psi < settings.PSI_DEGENERACY:
        raise DegenerateDirection(
            f"min Psi = {min_psi:.3e} below {settings.PSI_DEGENERACY:g}; a field with a vanishing "
            f"directional energy is identically zero and has no kernel"
        )
    n = ds.dim
    log_s = _log_power_mean(psi_values, ds, p)
    log_alpha = math.log(alpha_np(n, p))
    log_c = p * log_alpha - ((n + p) / n) * log_s - ((n + p) / p) * np.log(psi_values) + np.log(ds.weights)
    e = math.exp(log_alpha - log_s / n)
    return KernelCoefficients(coeffs=np.exp(log_c), energy=e, psi=psi_values, p=p, rule=ds.key())


def kernel(u: ScalarField, ds: DirectionSet, p: float) -> KernelCoefficients:
    """
    Coefficients c_j of H_u^p.

    Raises:
        DegenerateDirection: min Psi_j < PSI_DEGENERACY
    """
    return kernel_from_psi(psi(u, ds, p), ds, p)


def kernel_factor(t: np.ndarray, p: float, eps: float) -> np.ndarray:
    """
    |t|^{p-1} sgn t, or t (t^2 + eps^2)^{(p-2)/2} for 1 < p < 2.

    The regularized form is smooth at t = 0 and tends to |t|^{p-1} sgn t.
    """
    if p >= 2:
        return np.abs(t) ** (p - 2.0) * t
    return t * (t * t + eps * eps) ** ((p - 2.0) / 2.0)


def _regularization(g: np.ndarray) -> float:
    return REG_SCALE * float(np.max(np.abs(g))) if g.size else 0.0


def kernel_flux(g: np.ndarray, vol: float, kern: KernelCoefficients, ds: DirectionSet) -> np.ndarray:
    """F_c = vol * sum_j c_j phi_p(g_c . xi_j) xi_j, shape ``(n_cells, dim)``."""
    check_rule(kern, ds)
    xi = ds.directions
    eps = _regularization(g)

    def block(bounds):
        s, e = bounds
        t = g[s:e] @ xi.T
        return (kernel_factor(t, kern.p, eps) * kern.coeffs) @ xi

    parts = ordered_map(block, chunk_bounds(len(g)))
    return vol * np.concatenate(parts, axis=0)


def weak_form(u: ScalarField, ds: DirectionSet, p: float, phi: ScalarField,
              kern: Optional[KernelCoefficients] = None) -> float:
    """
    Pairing of the affine p-Laplacian of u with phi.

    sum_cells vol * sum_j c_j phi_p(xi_j . g_u) (xi_j . g_phi), which equals
    (1/p) d/dt E^p(u + t phi) at t = 0.

    Raises:
        DegenerateDirection, GridMismatch
    """
    require_same_grid(u, phi)
    _check_dims(u, ds)
    g = cell_gradient_array(u.dom, u.values)
    if kern is None:
        kern = kernel_from_psi(psi_from_gradients(g, u.dom.cell_volume, ds, p), ds, p)
    flux = kernel_flux(g, u.dom.cell_volume, kern, ds)
    g_phi = cell_gradient_array(phi.dom, phi.values)
    return float(np.sum(flux * g_phi))


def energy_gradient(u: ScalarField, ds: DirectionSet, p: float) -> np.ndarray:
    """
    Gradient of E^p with respect to the nodal values, in node layout.

    Masked nodes carry 0. Assembled in one sweep as p * D^T F.
    """
    _, grad = affine_objective(u, ds, p)
    return grad


def affine_objective(u: ScalarField, ds: DirectionSet, p: float) -> Tuple[float, np.ndarray]:
    """(E^p, dE^p/du) sharing one gradient and Psi evaluation."""
    _check_dims(u, ds)
    g = cell_gradient_array(u.dom, u.values)
    kern = kernel_from_psi(psi_from_gradients(g, u.dom.cell_volume, ds, p), ds, p)
    flux = kernel_flux(g, u.dom.cell_volume, kern, ds)
    return kern.energy ** p, p * gradients_transpose(u.dom, flux)


def classical_flux(g: np.ndarray, vol: float, p: float) -> np.ndarray:
    """vol * |g|^{p-2} g per cell, regularized like kernel_factor for p < 2."""
    sq = np.sum(g * g, axis=1)
    if p >= 2:
        factor = sq ** ((p - 2.0) / 2.0)
    else:
        eps = _regularization(g)
        factor = (sq + eps * eps) ** ((p - 2.0) / 2.0)
    return vol * factor[:, None] * g


def classical_objective(u: ScalarField, p: float) -> Tuple[float, np.ndarray]:
    """(||grad u||_p^p, its nodal gradient)."""
    g = cell_gradient_array(u.dom, u.values)
    vol = u.dom.cell_volume
    value = vol * float(np.sum(np.sum(g * g, axis=1) ** (p / 2.0)))
    return value, p * gradients_transpose(u.dom, classical_flux(g, vol, p))


# ==================== Inequality diagnostics ====================

def energy_p(u: ScalarField, ds: DirectionSet, p: float) -> float:
    e, _ = energy_from_psi(psi(u, ds, p), ds, p)
    return e ** p


def superadditivity_check(u: ScalarField, ds: DirectionSet, p: float, h: float) -> float:
    """
    gap = E^p(u) - E^p(T_h u) - E^p(R_h u).

    The gradients of T_h u and R_h u live on the disjoint sets {|u| < h}
    and {|u| > h}, so Psi(u) splits as Psi(T_h u) + Psi(R_h u). The split is
    taken cellwise with truncation_shares: each cell's |g . xi_j|^p goes to
    the lower part in proportion to its corners with |u| <= h. E^p is a
    concave 1-homogeneous function of Psi, hence gap >= 0 up to rounding;
    it vanishes when both parts have proportional Psi (radial u on a ball).
    """
    _check_dims(u, ds)
    g = cell_gradient_array(u.dom, u.values)
    vol = u.dom.cell_volume
    shares = truncation_shares(u, h)
    xi = ds.directions
    full = psi_from_gradients(g, vol, ds, p)
    lower = vol * chunked_sum(lambda s, e: shares[s:e] @ (np.abs(g[s:e] @ xi.T) ** p), len(g))
    lower = np.minimum(lower, full)
    rest = full - lower

    def ep(values):
        return energy_from_psi(values, ds, p)[0] ** p

    gap = ep(full) - ep(lower) - ep(rest)
    logger.debug(f"[Energy] superadditivity h={h:g} gap={gap:.3e}")
    return gap


def comparison_steps(u: ScalarField, ds: DirectionSet, p: float) -> ComparisonSteps:
    """
    Intermediate quantities of E <= ||grad u||_p.

    The power-mean (Hoelder) step gives
        E <= alpha (n w_n)^{-(n+p)/(np)} (sum_j w_j Psi_j)^{1/p}
    exactly. Exchanging the sums turns sum_j w_j Psi_j into
    vol * sum_c |g_c|^p M(g_c/|g_c|) with M the discrete moment, so the bound
    exceeds ||grad u||_p by at most the rule's anisotropy max (M/M_exact)^{1/p} - 1.
    """
    _check_dims(u, ds)
    n = ds.dim
    g = cell_gradient_array(u.dom, u.values)
    vol = u.dom.cell_volume
    values = psi_from_gradients(g, vol, ds, p)
    e, _ = energy_from_psi(values, ds, p)
    area = sphere_measure(n)
    alpha = alpha_np(n, p)
    holder = alpha * area ** (-(n + p) / (n * p)) * float(np.sum(ds.weights * values)) ** (1.0 / p)

    norms = np.linalg.norm(g, axis=1)
    gnorm = float((vol * np.sum(norms ** p)) ** (1.0 / p))
    active = norms > 0
    anisotropy = 0.0
    if np.any(active):
        unit = g[active] / norms[active, None]
        moments = (np.abs(unit @ ds.directions.T) ** p) @ ds.weights
        exact = area ** ((n + p) / n) * alpha ** (-p)
        anisotropy = max(0.0, float(np.max(moments / exact)) ** (1.0 / p) - 1.0)
    return ComparisonSteps(energy=e, holder_bound=holder, grad_norm=gnorm, anisotropy=anisotropy)


def _check_dims(u: ScalarField, ds: DirectionSet) -> None:
    if u.dom.dim != ds.dim:
        raise GridMismatch(f"{u.dom.dim}D field used with {ds.dim}D directions")
