"""
Run configuration read from the plain-text ``key = value`` file.

Values arrive as strings; list-valued keys use commas (center, half_axes),
``x y`` pairs separated by semicolons (vertices) or rows separated by
slashes (mask).
"""
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from affine_vlab.schemas.domain import DomainSpec
from affine_vlab.schemas.solve import SolveConfig
from affine_vlab.utils.validators import validate_exponents

Command = Literal["constants", "energy", "eigen", "solve", "scan-lambda", "verify", "dump-field", "heatmap"]

COMMANDS = ("constants", "energy", "eigen", "solve", "scan-lambda", "verify", "dump-field", "heatmap")


def _split_floats(v, sep=","):
    if isinstance(v, str):
        return [float(x) for x in v.replace(";", sep).split(sep) if x.strip()]
    return v


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    command: Optional[Command] = None

    # Domain
    domain: str = "disk"
    n: int = Field(2, ge=2, le=3)
    radius: float = Field(1.0, gt=0)
    center: Optional[List[float]] = None
    half_axes: Optional[List[float]] = None
    vertices: Optional[List[List[float]]] = None
    mask: Optional[List[str]] = None

    # Exponents
    p: float = 2.0
    q: Optional[float] = None
    lambda_: float = Field(0.0, alias="lambda")
    lambda_min: float = 0.0
    lambda_max: Optional[float] = None
    lambda_count: int = Field(10, ge=1)

    # Discretization
    h: float = Field(0.05, gt=0)
    m: Optional[int] = Field(None, ge=4)
    nodes: int = Field(2000, ge=3)

    # Solver
    max_iter: int = Field(20000, ge=1)
    tol_rel: float = Field(1e-8, gt=0)
    restarts: int = Field(5, ge=0)
    seed: int = 0
    energy_kind: Literal["affine", "classical"] = "affine"
    experimental: bool = False

    # Fields and output
    field: Optional[str] = None
    source: Literal["bump", "random", "bubble", "eigen", "solve"] = "bump"
    bubble_a: float = Field(1.0, gt=0)
    bubble_b: float = Field(1.0, gt=0)
    heatmap_format: Literal["pgm", "png"] = "pgm"
    output_dir: str = "output"
    timestamp: bool = False

    # Verify
    level: Literal["fast", "full"] = "fast"
    checks: Optional[List[str]] = None
    corrupt: bool = False

    @field_validator("center", "half_axes", mode="before")
    @classmethod
    def split_vector(cls, v):
        return _split_floats(v)

    @field_validator("vertices", mode="before")
    @classmethod
    def split_vertices(cls, v):
        if isinstance(v, str):
            return [[float(x) for x in pair.replace(",", " ").split()] for pair in v.split(";") if pair.strip()]
        return v

    @field_validator("mask", mode="before")
    @classmethod
    def split_mask(cls, v):
        if isinstance(v, str):
            return [row.strip() for row in v.split("/") if row.strip()]
        return v

    @field_validator("checks", mode="before")
    @classmethod
    def split_checks(cls, v):
        if isinstance(v, str):
            return [name.strip() for name in v.split(",") if name.strip()]
        return v

    @model_validator(mode="after")
    def check_ranges(self):
        if self.command == "constants":
            if self.p < 1:
                raise ValueError(f"p must be at least 1, got p = {self.p}")
            return self
        if self.command in ("verify", "heatmap"):
            if self.command == "heatmap" and self.field is None:
                raise ValueError("heatmap needs field = <path>")
            return self
        if self.command == "scan-lambda" and not 1 < self.p < self.n:
            raise ValueError(f"p must satisfy 1 < p < n = {self.n}, got p = {self.p}")
        if self.command == "energy" and self.q is None and (self.field is not None or self.source in ("bump", "random")):
            # The energy of a given field is defined down to p = 1
            if self.p < 1:
                raise ValueError(f"p must be at least 1, got p = {self.p}")
        else:
            ok, message = validate_exponents(self.n, self.p, self.q)
            if not ok:
                raise ValueError(message)
        if self.command == "solve" and self.q is None:
            raise ValueError("solve needs q")
        if self.lambda_max is not None and self.lambda_max < self.lambda_min:
            raise ValueError("lambda_max must not be below lambda_min")
        return self

    # ==================== Derived configs ====================

    def domain_spec(self) -> DomainSpec:
        kind = self.domain.strip().lower()
        kwargs = {"kind": kind, "dim": self.n}
        if self.center is not None:
            kwargs["center"] = self.center
        if kind in ("disk", "ball"):
            kwargs["radius"] = self.radius
        if self.half_axes is not None:
            kwargs["half_axes"] = self.half_axes
        if self.vertices is not None:
            kwargs["vertices"] = self.vertices
        if self.mask is not None:
            kwargs["mask_rows"] = self.mask
        return DomainSpec(**kwargs)

    def solve_config(self, q: Optional[float] = None) -> SolveConfig:
        return SolveConfig(
            p=self.p,
            q=q,
            lambda_=self.lambda_,
            max_iter=self.max_iter,
            tol_rel=self.tol_rel,
            restarts=self.restarts,
            seed=self.seed,
            m=self.m,
            domain=self.domain_spec(),
            h=self.h,
            energy_kind=self.energy_kind,
            experimental=self.experimental,
        )

    def to_text(self) -> str:
        """Resolved configuration in the input format, one key per line."""
        lines = []
        for key, value in self.model_dump(by_alias=True, exclude_none=True).items():
            if key in ("center", "half_axes"):
                value = ", ".join(repr(float(v)) for v in value)
            elif key == "vertices":
                value = "; ".join(" ".join(repr(float(x)) for x in pair) for pair in value)
            elif key == "mask":
                value = "/".join(value)
            elif key == "checks":
                value = ", ".join(value)
            elif isinstance(value, bool):
                value = str(value).lower()
            elif isinstance(value, float):
                value = repr(value)
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"
