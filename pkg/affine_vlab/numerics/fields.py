"""
Grid functions on a GridDomain.

Discretization:
- u is the piecewise multilinear interpolant of its nodal values.
- The gradient in a cell is the interpolant's gradient at the centroid,
  i.e. the average of the forward differences of the cell's parallel edges.
- Volume integrals use one-point (centroid) quadrature over active cells.

Masked nodes always hold 0.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from affine_vlab.core.errors import GridMismatch, NonFinite, OutOfRange, SingularMatrix
from affine_vlab.numerics.geometry import GridDomain, corner_offsets, corner_slice

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Nodal values of a zero-trace grid function."""

    dom: GridDomain
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != self.dom.shape:
            raise GridMismatch(f"values shape {vals.shape} does not match grid shape {self.dom.shape}")
        vals = np.where(self.dom.inside_mask, vals, 0.0)
        if not np.all(np.isfinite(vals)):
            raise NonFinite("field has non-finite values")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def zeros(cls, dom: GridDomain) -> "ScalarField":
        return cls(dom, np.zeros(dom.shape))

    @classmethod
    def from_function(cls, dom: GridDomain, fn) -> "ScalarField":
        """Sample fn(points) where points has shape ``(*shape, dim)``."""
        return cls(dom, fn(dom.node_coords()))

    @classmethod
    def from_interior(cls, dom: GridDomain, vector: np.ndarray) -> "ScalarField":
        values = np.zeros(dom.shape)
        values[dom.inside_mask] = vector
        return cls(dom, values)

    def interior(self) -> np.ndarray:
        """Free nodal values as a flat vector (C order)."""
        return self.values[self.dom.inside_mask]

    def scaled(self, c: float) -> "ScalarField":
        return ScalarField(self.dom, c * self.values)

    def abs(self) -> "ScalarField":
        return ScalarField(self.dom, np.abs(self.values))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def __add__(self, other: "ScalarField") -> "ScalarField":
        require_same_grid(self, other)
        return ScalarField(self.dom, self.values + other.values)


@dataclass(frozen=True, eq=False)
class CellGradients:
    """Constant gradient per active cell, shape ``(n_cells, dim)``."""

    g: np.ndarray
    volume: float


def require_same_grid(u: ScalarField, v: ScalarField) -> None:
    if u.dom is not v.dom and not u.dom.same_grid(v.dom):
        raise GridMismatch("fields live on different grids")


# ==================== Stencils ====================

def _average_along(a: np.ndarray, axis: int) -> np.ndarray:
    lo = [slice(None)] * a.ndim
    hi = [slice(None)] * a.ndim
    lo[axis] = slice(None, -1)
    hi[axis] = slice(1, None)
    return 0.5 * (a[tuple(lo)] + a[tuple(hi)])


def _average_along_transpose(c: np.ndarray, axis: int) -> np.ndarray:
    shape = list(c.shape)
    shape[axis] += 1
    out = np.zeros(shape)
    lo = [slice(None)] * c.ndim
    hi = [slice(None)] * c.ndim
    lo[axis] = slice(None, -1)
    hi[axis] = slice(1, None)
    out[tuple(lo)] += 0.5 * c
    out[tuple(hi)] += 0.5 * c
    return out


def _diff_transpose(c: np.ndarray, axis: int, h: float) -> np.ndarray:
    shape = list(c.shape)
    shape[axis] += 1
    out = np.zeros(shape)
    lo = [slice(None)] * c.ndim
    hi = [slice(None)] * c.ndim
    lo[axis] = slice(None, -1)
    hi[axis] = slice(1, None)
    out[tuple(hi)] += c / h
    out[tuple(lo)] -= c / h
    return out


def cell_gradient_array(dom: GridDomain, values: np.ndarray) -> np.ndarray:
    """Gradients of every active cell, shape ``(n_cells, dim)``."""
    comps = []
    for k in range(dom.dim):
        d = np.diff(values, axis=k) / dom.h
        for j in range(dom.dim):
            if j != k:
                d = _average_along(d, j)
        comps.append(d[dom.cell_mask])
    return np.stack(comps, axis=1)


def gradients_transpose(dom: GridDomain, flux: np.ndarray) -> np.ndarray:
    """
    Adjoint of cell_gradient_array.

    Maps per-cell vectors F (n_cells, dim) to nodal values sum_c F_c . dg_c/du_i;
    masked nodes receive 0.
    """
    cell_shape = tuple(s - 1 for s in dom.shape)
    out = np.zeros(dom.shape)
    for k in range(dom.dim):
        full = np.zeros(cell_shape)
        full[dom.cell_mask] = flux[:, k]
        for j in range(dom.dim):
            if j != k:
                full = _average_along_transpose(full, j)
        out += _diff_transpose(full, k, dom.h)
    out[~dom.inside_mask] = 0.0
    return out


def centroid_values(u: ScalarField) -> np.ndarray:
    """Interpolant at active cell centroids (average of the cell corners)."""
    dom = u.dom
    acc = np.zeros(tuple(s - 1 for s in dom.shape))
    for offset in corner_offsets(dom.dim):
        acc += u.values[corner_slice(offset, dom.shape)]
    return acc[dom.cell_mask] / 2 ** dom.dim


def centroid_values_transpose(dom: GridDomain, cell_values: np.ndarray) -> np.ndarray:
    full = np.zeros(tuple(s - 1 for s in dom.shape))
    full[dom.cell_mask] = cell_values / 2 ** dom.dim
    out = np.zeros(dom.shape)
    for offset in corner_offsets(dom.dim):
        out[corner_slice(offset, dom.shape)] += full
    out[~dom.inside_mask] = 0.0
    return out


# ==================== Operations ====================

def gradients(u: ScalarField) -> CellGradients:
    """Per-cell gradient of the multilinear interpolant at the centroid."""
    return CellGradients(g=cell_gradient_array(u.dom, u.values), volume=u.dom.cell_volume)


def lq_norm(u: ScalarField, q: float) -> float:
    """(sum_cells vol * |u(centroid)|^q)^{1/q}."""
    if q < 1:
        raise OutOfRange(f"lq_norm needs q >= 1, got {q}")
    c = centroid_values(u)
    return float((u.dom.cell_volume * np.sum(np.abs(c) ** q)) ** (1.0 / q))


def grad_norm(u: ScalarField, p: float) -> float:
    """||grad u||_{L^p}, the Euclidean gradient norm."""
    g = cell_gradient_array(u.dom, u.values)
    return float((u.dom.cell_volume * np.sum(np.linalg.norm(g, axis=1) ** p)) ** (1.0 / p))


def truncate(u: ScalarField, h: float) -> Tuple[ScalarField, ScalarField]:
    """
    Nodewise split u = T_h u + R_h u with T_h(s) = min(max(s, -h), h).

    R_h u is u - clip(u) rounded once; T_h u is then taken as u - R_h u,
    which is exact in floating point, so the two parts add back to u bit
    for bit.
    """
    if not h > 0:
        raise OutOfRange(f"truncation level must be positive, got {h}")
    v = u.values
    rest = v - np.clip(v, -h, h)
    return ScalarField(u.dom, v - rest), ScalarField(u.dom, rest)


def truncation_shares(u: ScalarField, h: float) -> np.ndarray:
    """
    Per active cell, the share of corners where |u| <= h.

    Cells inside {|u| <= h} get 1 and cells inside {|u| > h} get 0; cells
    cut by the level set are split by their corner count.
    """
    _, rest = truncate(u, h)
    flat = (rest.values == 0.0).astype(float)
    acc = np.zeros(tuple(s - 1 for s in u.dom.shape))
    for offset in corner_offsets(u.dom.dim):
        acc += flat[corner_slice(offset, u.dom.shape)]
    return acc[u.dom.cell_mask] / 2 ** u.dom.dim


def pullback(u: ScalarField, T, target: GridDomain) -> ScalarField:
    """
    Sample u o T on the target grid by multilinear interpolation.

    Raises:
        SingularMatrix: |det T| < 1e-12
    """
    T = np.asarray(T, dtype=float)
    if T.shape != (u.dom.dim, u.dom.dim) or abs(np.linalg.det(T)) < 1e-12:
        raise SingularMatrix("pullback needs a nonsingular square matrix")
    interp = RegularGridInterpolator(u.dom.axes(), u.values, method="linear", bounds_error=False, fill_value=0.0)
    mapped = target.node_coords() @ T.T
    return ScalarField(target, interp(mapped))


def radial_profile(u: ScalarField, center=None, bins: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray, float]:
    """
    Binned radial means of u about center and the relative scatter.

    Returns:
        (bin radii, bin means, scatter) where scatter is the RMS deviation of
        interior values from the interpolated profile divided by max|u|
    """
    dom = u.dom
    c = np.zeros(dom.dim) if center is None else np.asarray(center, dtype=float)
    pts = dom.node_coords()[dom.inside_mask]
    vals = u.values[dom.inside_mask]
    r = np.linalg.norm(pts - c, axis=1)
    n_bins = bins or max(4, int(np.ceil(r.max() / dom.h)))
    edges = np.linspace(0.0, r.max() * (1 + 1e-12), n_bins + 1)
    idx = np.clip(np.digitize(r, edges) - 1, 0, n_bins - 1)
    counts = np.bincount(idx, minlength=n_bins)
    sums = np.bincount(idx, weights=vals, minlength=n_bins)
    filled = counts > 0
    radii = 0.5 * (edges[:-1] + edges[1:])[filled]
    means = sums[filled] / counts[filled]
    scale = np.max(np.abs(vals)) if vals.size else 0.0
    if scale == 0:
        return radii, means, float("inf")
    residual = vals - np.interp(r, radii, means)
    return radii, means, float(np.sqrt(np.mean(residual ** 2)) / scale)


# ==================== Reference and seeded fields ====================

def bump(dom: GridDomain, center=None, radius: float = 1.0, matrix=None) -> ScalarField:
    """(1 - |A(x - c)|^2 / R^2)_+, the quadratic radial bump when A = I."""
    c = np.zeros(dom.dim) if center is None else np.asarray(center, dtype=float)
    A = np.eye(dom.dim) if matrix is None else np.asarray(matrix, dtype=float)

    def profile(x):
        y = (x - c) @ A.T
        return np.maximum(1.0 - np.sum(y ** 2, axis=-1) / radius ** 2, 0.0)

    return ScalarField.from_function(dom, profile)


def _box_envelope(dom: GridDomain) -> Tuple[np.ndarray, np.ndarray]:
    x = dom.node_coords()
    lo = dom.origin
    span = dom.h * (np.asarray(dom.shape) - 1)
    t = (x - lo) / span
    return x, np.prod(np.sin(np.pi * t), axis=-1)


def band_limited_field(dom: GridDomain, rng: np.random.Generator, max_mode: int = 3, positive: bool = False) -> ScalarField:
    """
    Smooth random field: low-frequency cosine noise under a sine envelope.

    With positive=True the noise is shifted into [0.5, 1.5] so the field is
    positive at every interior node.
    """
    x, envelope = _box_envelope(dom)
    t = (x - dom.origin) / (dom.h * (np.asarray(dom.shape) - 1))
    noise = np.zeros(dom.shape)
    for k in np.ndindex(*([max_mode + 1] * dom.dim)):
        kv = np.asarray(k, dtype=float)
        amp = rng.normal() / (1.0 + kv @ kv)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        noise += amp * np.cos(np.pi * (t @ kv) + phase)
    if positive:
        noise = 1.0 + 0.5 * noise / max(np.max(np.abs(noise)), 1e-300)
    return ScalarField(dom, envelope * noise)
