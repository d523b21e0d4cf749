"""
Domain description schemas.

A DomainSpec is the analytic description of a bounded open set; the
geometry module turns it into a GridDomain.
"""
from typing import List, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from affine_vlab.utils.validators import validate_polygon

DomainKind = Literal["rectangle", "ball", "ellipse", "polygon", "mask"]

_KIND_ALIASES = {
    "disk": "ball",
    "square": "rectangle",
    "box": "rectangle",
    "ellipsoid": "ellipse",
    "polygon-mask": "polygon",
}


class DomainSpec(BaseModel):
    """
    Analytic domain description.

    - rectangle: axis-aligned box, ``half_axes`` half side lengths
    - ball: Euclidean ball (disk in 2D), ``radius``
    - ellipse: axis-aligned ellipse/ellipsoid, ``half_axes`` semi-axes
    - polygon: simple closed 2D polygon, ``vertices``
    - mask: raster of '0'/'1' rows spanning the box ``center +- half_axes``
    """
    kind: DomainKind
    dim: int = Field(2, ge=2, le=3)
    center: Optional[List[float]] = None
    radius: Optional[float] = Field(None, gt=0)
    half_axes: Optional[List[float]] = None
    vertices: Optional[List[List[float]]] = None
    mask_rows: Optional[List[str]] = None

    @field_validator("kind", mode="before")
    @classmethod
    def normalize_kind(cls, v):
        if isinstance(v, str):
            key = v.strip().lower()
            return _KIND_ALIASES.get(key, key)
        return v

    @model_validator(mode="after")
    def check_parameters(self):
        if self.center is None:
            self.center = [0.0] * self.dim
        if len(self.center) != self.dim:
            raise ValueError(f"center must have {self.dim} coordinates")

        if self.kind == "ball":
            if self.radius is None:
                raise ValueError("ball domain requires radius")
        elif self.kind in ("rectangle", "ellipse", "mask"):
            if self.half_axes is None or len(self.half_axes) != self.dim:
                raise ValueError(f"{self.kind} domain requires {self.dim} half_axes")
            if any(a < 0 for a in self.half_axes):
                raise ValueError("half_axes must be nonnegative")
        elif self.kind == "polygon":
            if self.dim != 2:
                raise ValueError("polygon domains are two-dimensional")
            if not self.vertices:
                raise ValueError("polygon domain requires vertices")
            ok, message = validate_polygon(self.vertices)
            if not ok:
                raise ValueError(message)

        if self.kind == "mask":
            if self.dim != 2:
                raise ValueError("mask domains are two-dimensional")
            if not self.mask_rows:
                raise ValueError("mask domain requires mask_rows")
            widths = {len(row) for row in self.mask_rows}
            if len(widths) != 1:
                raise ValueError("mask rows must all have the same length")
            if any(ch not in "01" for row in self.mask_rows for ch in row):
                raise ValueError("mask rows may only contain '0' and '1'")
        return self

    # ==================== Convenience constructors ====================

    @classmethod
    def ball_domain(cls, dim: int = 2, radius: float = 1.0, center: Optional[List[float]] = None) -> "DomainSpec":
        return cls(kind="ball", dim=dim, radius=radius, center=center or [0.0] * dim)

    @classmethod
    def box(cls, half_axes: List[float], center: Optional[List[float]] = None) -> "DomainSpec":
        dim = len(half_axes)
        return cls(kind="rectangle", dim=dim, half_axes=list(half_axes), center=center or [0.0] * dim)

    @classmethod
    def unit_square(cls) -> "DomainSpec":
        """[0, 1]^2."""
        return cls.box([0.5, 0.5], center=[0.5, 0.5])
