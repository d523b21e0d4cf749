"""
Grid quotients minimized by the solvers.

    Q(u) = (A(u) - lambda * ||u||_p^p) / ||u||_q^p

with A = E^p (affine) or ||grad u||_p^p (classical). q = p and lambda = 0
give the Rayleigh quotient of the principal eigenvalue. Free variables are
the interior nodal values.
"""
import logging
from typing import Tuple

import numpy as np

from affine_vlab.numerics.affine_energy import affine_objective, classical_objective, energy_p
from affine_vlab.numerics.fields import (
    ScalarField,
    centroid_values,
    centroid_values_transpose,
    grad_norm,
)
from affine_vlab.numerics.geometry import GridDomain
from affine_vlab.numerics.quadrature import DirectionSet

logger = logging.getLogger(__name__)


def _signed_power(t: np.ndarray, e: float) -> np.ndarray:
    return np.sign(t) * np.abs(t) ** e


class GridQuotient:
    """Scale-invariant quotient on one grid and direction set."""

    def __init__(self, dom: GridDomain, ds: DirectionSet, p: float, q: float,
                 lam: float = 0.0, energy_kind: str = "affine"):
        self.dom = dom
        self.ds = ds
        self.p = p
        self.q = q
        self.lam = lam
        self.energy_kind = energy_kind

    def field(self, x: np.ndarray) -> ScalarField:
        return ScalarField.from_interior(self.dom, x)

    # ==================== Pieces ====================

    def gradient_energy(self, u: ScalarField) -> Tuple[float, np.ndarray]:
        """(A(u), dA/du) in node layout."""
        if self.energy_kind == "classical":
            return classical_objective(u, self.p)
        return affine_objective(u, self.ds, self.p)

    def energy_value(self, u: ScalarField) -> float:
        if self.energy_kind == "classical":
            return grad_norm(u, self.p) ** self.p
        return energy_p(u, self.ds, self.p)

    def power_integral(self, u: ScalarField, exponent: float) -> float:
        """vol * sum_cells |u(centroid)|^exponent."""
        return self.dom.cell_volume * float(np.sum(np.abs(centroid_values(u)) ** exponent))

    def power_integral_gradient(self, u: ScalarField, exponent: float) -> np.ndarray:
        c = centroid_values(u)
        return centroid_values_transpose(self.dom, self.dom.cell_volume * exponent * _signed_power(c, exponent - 1.0))

    def source_pairing(self, u: ScalarField, phi: ScalarField) -> float:
        """Integral of f(u) phi with f(t) = |t|^{q-2} t + lambda |t|^{p-2} t."""
        cu = centroid_values(u)
        cphi = centroid_values(phi)
        f = _signed_power(cu, self.q - 1.0) + self.lam * _signed_power(cu, self.p - 1.0)
        return self.dom.cell_volume * float(np.sum(f * cphi))

    # ==================== Quotient ====================

    def level(self, u: ScalarField) -> float:
        numerator = self.energy_value(u) - self.lam * self.power_integral(u, self.p)
        return numerator / self.power_integral(u, self.q) ** (self.p / self.q)

    def normalize(self, x: np.ndarray) -> np.ndarray:
        """Scale to unit L^q norm."""
        norm = self.power_integral(self.field(x), self.q) ** (1.0 / self.q)
        return x / norm

    def __call__(self, x: np.ndarray) -> Tuple[float, np.ndarray]:
        u = self.field(x)
        a, grad_a = self.gradient_energy(u)
        b = self.power_integral(u, self.p)
        n_q = self.power_integral(u, self.q)
        top = a - self.lam * b
        grad_top = grad_a
        if self.lam != 0.0:
            grad_top = grad_a - self.lam * self.power_integral_gradient(u, self.p)
        scale = n_q ** (-self.p / self.q)
        level = top * scale
        grad = scale * grad_top - (self.p / self.q) * level / n_q * self.power_integral_gradient(u, self.q)
        return level, grad[self.dom.inside_mask]
