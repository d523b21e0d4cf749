from typing import Optional, Sequence

import numpy as np


def critical_exponent(n: int, p: float) -> float:
    """Sobolev critical exponent p* = np / (n - p); infinite for p >= n."""
    if p >= n:
        return float("inf")
    return n * p / (n - p)


def validate_exponents(n: int, p: float, q: Optional[float] = None) -> tuple[bool, Optional[str]]:
    """
    Validate the standing exponent assumptions 1 < p < n and p < q <= p*.

    Without q only p > 1 is required: the eigenvalue problem does not involve
    the critical exponent, so p >= n is admissible there.

    Returns (is_valid, error_message).
    """
    if n not in (2, 3):
        return False, f"dimension n must be 2 or 3, got {n}"
    if q is None:
        if not p > 1:
            return False, f"p must exceed 1, got p = {p}"
        return True, None
    if not (1 < p < n):
        return False, f"p must satisfy 1 < p < n = {n}, got p = {p}"
    p_star = critical_exponent(n, p)
    if q <= p:
        return False, f"q must exceed p = {p}, got q = {q}"
    if q > p_star * (1 + 1e-12):
        return False, f"q exceeds p* = np/(n-p) = {p_star:.17g}"
    return True, None


def is_critical(n: int, p: float, q: float) -> bool:
    return abs(q - critical_exponent(n, p)) <= 1e-12 * max(1.0, q)


def polygon_signed_area(vertices: Sequence[Sequence[float]]) -> float:
    """Shoelace formula; positive for counter-clockwise vertex order."""
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def validate_polygon(vertices: Sequence[Sequence[float]]) -> tuple[bool, Optional[str]]:
    """
    Validate a closed simple polygon given by its vertex list.

    Requirements:
    - At least 3 vertices in 2D
    - Nonzero area
    - No two non-adjacent edges intersect
    """
    v = np.asarray(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
        return False, "polygon needs at least 3 two-dimensional vertices"
    if abs(polygon_signed_area(v)) <= 1e-14:
        return False, "polygon has zero area"

    edges = [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]
    for i in range(len(edges)):
        for j in range(i + 1, len(edges)):
            # Adjacent edges share a vertex
            if j == i + 1 or (i == 0 and j == len(edges) - 1):
                continue
            if _segments_cross(*edges[i], *edges[j]):
                return False, f"polygon edges {i} and {j} intersect"
    return True, None


def _segments_cross(a, b, c, d) -> bool:
    def orient(p, q, r):
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])

    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    return (o1 * o2 < 0) and (o3 * o4 < 0)
