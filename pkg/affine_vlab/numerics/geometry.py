"""
Bounded domains on uniform Cartesian grids.

A GridDomain is a node lattice ``origin + h * index`` with two masks:

- inside_mask (per node): True for interior nodes of the domain. Every other
  node carries the value 0, which encodes the zero trace on the boundary.
- cell_mask (per cell): cells taking part in volume integrals.

Grids built from an analytic DomainSpec activate a cell iff its centroid lies
strictly inside the domain; interior nodes that touch no active cell are
masked. Grids built from a raw node mask activate every cell with at least
one interior corner.
"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from affine_vlab.core.errors import EmptyDomain, OutOfRange, SingularMatrix, UnsupportedShape
from affine_vlab.schemas.domain import DomainSpec
from affine_vlab.utils.validators import polygon_signed_area

logger = logging.getLogger(__name__)

Predicate = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class GridDomain:
    """Discretized bounded open set with zero-trace mask and cell geometry."""

    dim: int
    origin: np.ndarray
    h: float
    shape: Tuple[int, ...]
    inside_mask: np.ndarray
    cell_mask: np.ndarray
    spec: Optional[DomainSpec] = None
    # Linear map F with domain = {y : F y in spec region}
    frame: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.frame is None:
            object.__setattr__(self, "frame", np.eye(self.dim))
        for name in ("origin", "inside_mask", "cell_mask", "frame"):
            getattr(self, name).setflags(write=False)

    # ==================== Geometry accessors ====================

    @property
    def cell_volume(self) -> float:
        return self.h ** self.dim

    @property
    def n_interior(self) -> int:
        return int(self.inside_mask.sum())

    @property
    def n_cells(self) -> int:
        return int(self.cell_mask.sum())

    @property
    def volume(self) -> float:
        """Sum of active cell volumes."""
        return self.n_cells * self.cell_volume

    def axes(self) -> list:
        return [self.origin[k] + self.h * np.arange(self.shape[k]) for k in range(self.dim)]

    def node_coords(self) -> np.ndarray:
        """Node coordinates, shape ``(*shape, dim)``."""
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)

    def cell_centroids(self) -> np.ndarray:
        """Centroids of active cells, shape ``(n_cells, dim)`` in C order."""
        axes = [self.origin[k] + self.h * (np.arange(self.shape[k] - 1) + 0.5) for k in range(self.dim)]
        centroids = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        return centroids[self.cell_mask]

    def same_grid(self, other: "GridDomain") -> bool:
        return (
            self.dim == other.dim
            and self.shape == other.shape
            and self.h == other.h
            and np.array_equal(self.origin, other.origin)
            and np.array_equal(self.inside_mask, other.inside_mask)
            and np.array_equal(self.cell_mask, other.cell_mask)
        )

    # ==================== Constructors ====================

    @classmethod
    def from_mask(cls, origin, h: float, inside_mask: np.ndarray) -> "GridDomain":
        """
        Grid from a raw node mask.

        Every cell with at least one interior corner is active, so integrals
        cover the whole support of the multilinear interpolant.
        """
        inside = np.array(inside_mask, dtype=bool)
        dim = inside.ndim
        cells = np.zeros(tuple(s - 1 for s in inside.shape), dtype=bool)
        for offset in corner_offsets(dim):
            cells |= inside[corner_slice(offset, inside.shape)]
        if not inside.any():
            raise EmptyDomain("mask has no interior node")
        return cls(
            dim=dim,
            origin=np.array(origin, dtype=float),
            h=float(h),
            shape=tuple(inside.shape),
            inside_mask=inside,
            cell_mask=cells,
        )


# ==================== Corner stencil helpers ====================

def corner_offsets(dim: int) -> list:
    """The 2^dim corner offsets of a cell, e.g. (0, 1) in 2D."""
    return list(itertools.product((0, 1), repeat=dim))


def corner_slice(offset, node_shape) -> tuple:
    """Slice of the node array holding the corner ``offset`` of every cell."""
    return tuple(slice(o, o + s - 1) for o, s in zip(offset, node_shape))


# ==================== Analytic membership ====================

def contains(spec: DomainSpec, points: np.ndarray) -> np.ndarray:
    """Strict membership test; points on the boundary are outside."""
    pts = np.asarray(points, dtype=float)
    c = np.asarray(spec.center, dtype=float)
    rel = pts - c

    if spec.kind == "ball":
        return np.sum(rel ** 2, axis=-1) < spec.radius ** 2
    if spec.kind == "rectangle":
        a = np.asarray(spec.half_axes, dtype=float)
        return np.all(np.abs(rel) < a, axis=-1)
    if spec.kind == "ellipse":
        a = np.asarray(spec.half_axes, dtype=float)
        return np.sum((rel / a) ** 2, axis=-1) < 1.0
    if spec.kind == "polygon":
        return _polygon_contains(np.asarray(spec.vertices, dtype=float), pts)
    if spec.kind == "mask":
        return _raster_contains(spec, pts)
    raise UnsupportedShape(f"unknown domain kind {spec.kind!r}")


def _polygon_contains(vertices: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Even-odd ray casting along +x; points on an edge count as outside."""
    x, y = pts[..., 0], pts[..., 1]
    inside = np.zeros(x.shape, dtype=bool)
    on_edge = np.zeros(x.shape, dtype=bool)
    n = len(vertices)
    for i in range(n):
        (x1, y1), (x2, y2) = vertices[i], vertices[(i + 1) % n]
        crosses = (y1 > y) != (y2 > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_hit = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses & (x < x_hit)

        cross = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1)
        within = (
            (np.minimum(x1, x2) <= x) & (x <= np.maximum(x1, x2))
            & (np.minimum(y1, y2) <= y) & (y <= np.maximum(y1, y2))
        )
        on_edge |= within & (np.abs(cross) <= 1e-12 * max(1.0, abs(x2 - x1) + abs(y2 - y1)))
    return inside & ~on_edge


def _raster_contains(spec: DomainSpec, pts: np.ndarray) -> np.ndarray:
    rows = spec.mask_rows
    raster = np.array([[ch == "1" for ch in row] for row in rows], dtype=bool)
    n_rows, n_cols = raster.shape
    c = np.asarray(spec.center, dtype=float)
    a = np.asarray(spec.half_axes, dtype=float)
    rel = pts - c
    in_box = np.all(np.abs(rel) < a, axis=-1)
    col = np.clip(((rel[..., 0] + a[0]) / (2 * a[0]) * n_cols).astype(int), 0, n_cols - 1)
    # Row 0 is the top of the raster
    row = np.clip(((a[1] - rel[..., 1]) / (2 * a[1]) * n_rows).astype(int), 0, n_rows - 1)
    return in_box & raster[row, col]


def bounding_box(spec: DomainSpec) -> Tuple[np.ndarray, np.ndarray]:
    c = np.asarray(spec.center, dtype=float)
    if spec.kind == "ball":
        r = np.full(spec.dim, spec.radius)
        return c - r, c + r
    if spec.kind == "polygon":
        v = np.asarray(spec.vertices, dtype=float)
        return v.min(axis=0), v.max(axis=0)
    a = np.asarray(spec.half_axes, dtype=float)
    return c - a, c + a


# ==================== Operations ====================

def build_grid(spec: DomainSpec, h: float) -> GridDomain:
    """
    Discretize a domain on a uniform grid of spacing h.

    The grid is centred on the bounding box so symmetric domains produce
    symmetric masks.

    Args:
        spec: Domain description
        h: Grid spacing (> 0)

    Returns:
        GridDomain with boundary and exterior nodes masked

    Raises:
        EmptyDomain: no interior node
    """
    if not h > 0:
        raise OutOfRange(f"grid spacing must be positive, got h = {h}")
    lo, hi = bounding_box(spec)
    if np.any(hi - lo <= 0):
        raise EmptyDomain(f"{spec.kind} domain has zero extent")

    predicate = lambda pts: contains(spec, pts)
    grid = _grid_from_box(lo, hi, h, predicate, spec=spec, frame=np.eye(spec.dim))
    logger.debug(
        f"[Geometry] built {spec.kind} grid shape={grid.shape} h={h} "
        f"interior={grid.n_interior} volume={grid.volume:.6g}"
    )
    return grid


def _grid_from_box(lo, hi, h, predicate: Predicate, spec=None, frame=None) -> GridDomain:
    dim = len(lo)
    n_cells = [max(1, int(math.ceil((hi[k] - lo[k]) / h - 1e-9))) for k in range(dim)]
    mid = 0.5 * (np.asarray(lo) + np.asarray(hi))
    origin = mid - 0.5 * h * np.asarray(n_cells, dtype=float)
    shape = tuple(nc + 1 for nc in n_cells)

    axes = [origin[k] + h * np.arange(shape[k]) for k in range(dim)]
    nodes = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    inside = np.asarray(predicate(nodes), dtype=bool)

    cell_axes = [origin[k] + h * (np.arange(shape[k] - 1) + 0.5) for k in range(dim)]
    centroids = np.stack(np.meshgrid(*cell_axes, indexing="ij"), axis=-1)
    cells = np.asarray(predicate(centroids), dtype=bool)

    # Interior nodes must belong to at least one active cell
    touched = np.zeros(shape, dtype=bool)
    for offset in corner_offsets(dim):
        touched[corner_slice(offset, shape)] |= cells
    inside &= touched

    if not inside.any():
        raise EmptyDomain("no interior node at this resolution")

    return GridDomain(
        dim=dim,
        origin=origin,
        h=float(h),
        shape=shape,
        inside_mask=inside,
        cell_mask=cells,
        spec=spec,
        frame=frame,
    )


def transform_domain(dom: GridDomain, T) -> GridDomain:
    """
    Remesh the preimage T^{-1}(Omega) at the same spacing.

    Follows the convention of u o T living on T^{-1}(Omega): a point z belongs
    to the new domain iff T z belongs to the old one.

    Raises:
        SingularMatrix: |det T| < 1e-12
    """
    T = np.asarray(T, dtype=float)
    if T.shape != (dom.dim, dom.dim):
        raise SingularMatrix(f"transform must be {dom.dim}x{dom.dim}, got {T.shape}")
    det = float(np.linalg.det(T))
    if abs(det) < 1e-12:
        raise SingularMatrix(f"transform is singular (det = {det:.3e})")

    if dom.spec is not None:
        frame = dom.frame @ T
        spec = dom.spec
        predicate = lambda pts: contains(spec, pts @ frame.T)
        lo, hi = bounding_box(spec)
    else:
        frame = T
        lookup = RegularGridInterpolator(
            dom.axes(), dom.inside_mask.astype(float), method="nearest", bounds_error=False, fill_value=0.0
        )
        predicate = lambda pts: lookup(pts @ frame.T) > 0.5
        lo = dom.origin
        hi = dom.origin + dom.h * (np.asarray(dom.shape) - 1)
        spec = None

    # Preimage of the source bounding box under the frame
    inverse = np.linalg.inv(frame)
    corners = np.array([[lo[k] if bit == 0 else hi[k] for k, bit in enumerate(bits)]
                        for bits in itertools.product((0, 1), repeat=dom.dim)])
    mapped = corners @ inverse.T
    grid = _grid_from_box(mapped.min(axis=0), mapped.max(axis=0), dom.h, predicate, spec=spec, frame=frame)
    logger.debug(f"[Geometry] transformed domain det={det:.6g} volume {dom.volume:.6g} -> {grid.volume:.6g}")
    return grid


def sample_boundary(spec: DomainSpec, count: int = 256) -> Tuple[np.ndarray, np.ndarray]:
    """
    Boundary samples and outward unit normals of a built-in shape.

    Raises:
        UnsupportedShape: raster masks carry no boundary normals
    """
    c = np.asarray(spec.center, dtype=float)

    if spec.kind in ("ball", "ellipse"):
        axes = np.full(spec.dim, spec.radius) if spec.kind == "ball" else np.asarray(spec.half_axes, dtype=float)
        dirs = _sphere_samples(spec.dim, count)
        points = c + dirs * axes
        normals = dirs / axes
        return points, normals / np.linalg.norm(normals, axis=1, keepdims=True)

    if spec.kind == "rectangle":
        a = np.asarray(spec.half_axes, dtype=float)
        per_axis = max(2, int(round(count ** (1.0 / max(1, spec.dim - 1)))))
        t = (np.arange(per_axis) + 0.5) / per_axis * 2 - 1
        points, normals = [], []
        for k in range(spec.dim):
            others = [j for j in range(spec.dim) if j != k]
            face = np.stack(np.meshgrid(*([t] * len(others)), indexing="ij"), axis=-1).reshape(-1, len(others))
            for sign in (-1.0, 1.0):
                pts = np.zeros((len(face), spec.dim))
                pts[:, k] = sign * a[k]
                pts[:, others] = face * a[others]
                nrm = np.zeros_like(pts)
                nrm[:, k] = sign
                points.append(c + pts)
                normals.append(nrm)
        return np.concatenate(points), np.concatenate(normals)

    if spec.kind == "polygon":
        v = np.asarray(spec.vertices, dtype=float)
        orientation = 1.0 if polygon_signed_area(v) > 0 else -1.0
        per_edge = max(2, count // len(v))
        t = (np.arange(per_edge) + 0.5) / per_edge
        points, normals = [], []
        for i in range(len(v)):
            a, b = v[i], v[(i + 1) % len(v)]
            edge = b - a
            # Outward normal of a counter-clockwise polygon is (dy, -dx)
            nrm = orientation * np.array([edge[1], -edge[0]]) / np.linalg.norm(edge)
            points.append(a + t[:, None] * edge)
            normals.append(np.tile(nrm, (per_edge, 1)))
        return np.concatenate(points), np.concatenate(normals)

    raise UnsupportedShape(f"{spec.kind} domains carry no boundary normals")


def _sphere_samples(dim: int, count: int) -> np.ndarray:
    if dim == 2:
        theta = 2 * np.pi * (np.arange(count) + 0.5) / count
        return np.stack([np.cos(theta), np.sin(theta)], axis=1)
    from affine_vlab.numerics.quadrature import directions
    return directions(3, count).directions


def is_star_shaped(spec: DomainSpec, center=None) -> bool:
    """
    True iff (x - center) . nu(x) > 0 at every boundary sample.

    Raises:
        UnsupportedShape: raster masks
    """
    points, normals = sample_boundary(spec)
    c = np.asarray(spec.center if center is None else center, dtype=float)
    return bool(np.all(np.sum((points - c) * normals, axis=1) > 0))
