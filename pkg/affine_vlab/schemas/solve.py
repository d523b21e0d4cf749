"""
Solver configuration.

SolveConfig carries everything one grid solve needs; the grid itself is
built lazily from ``domain`` and ``h`` unless a GridDomain handle is passed.
"""
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator

from affine_vlab.core.config import settings
from affine_vlab.schemas.domain import DomainSpec
from affine_vlab.utils.validators import is_critical, validate_exponents

EnergyKind = Literal["affine", "classical"]


class SolveConfig(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, populate_by_name=True)

    p: float
    q: Optional[float] = None
    lambda_: float = Field(0.0, alias="lambda")

    # Descent control
    max_iter: int = Field(20000, ge=1)
    tol_rel: float = Field(1e-8, gt=0)
    grad_tol: float = Field(1e-10, gt=0)
    window: int = Field(10, ge=1)
    armijo: float = Field(1e-4, gt=0, lt=1)
    backtrack: float = Field(0.5, gt=0, lt=1)
    max_backtracks: int = Field(60, ge=1)
    initial_step: float = Field(0.1, gt=0)
    polish_iter: int = Field(2000, ge=0)

    # Multi-start
    restarts: int = Field(5, ge=0)
    seed: int = 0
    radial_init_only: bool = False

    # Discretization
    m: Optional[int] = Field(None, ge=4)
    domain: DomainSpec = Field(default_factory=lambda: DomainSpec.ball_domain(2, 1.0))
    h: float = Field(0.05, gt=0)
    grid: Optional[Any] = None

    energy_kind: EnergyKind = "affine"
    experimental: bool = False
    residual_tests: int = Field(32, ge=1)

    _grid_cache: Any = PrivateAttr(default=None)

    @model_validator(mode="after")
    def check_exponents(self):
        ok, message = validate_exponents(self.n, self.p, self.q)
        if not ok:
            raise ValueError(message)
        if self.q is not None and is_critical(self.n, self.p, self.q) and not self.experimental:
            raise ValueError(
                "q = p* on a full grid is experimental (set experimental = true); "
                "use the radial critical solver instead"
            )
        return self

    @property
    def n(self) -> int:
        if self.grid is not None:
            return self.grid.dim
        return self.domain.dim

    @property
    def directions_count(self) -> int:
        if self.m is not None:
            return self.m
        return settings.DEFAULT_DIRECTIONS_2D if self.n == 2 else settings.DEFAULT_DIRECTIONS_3D

    def resolve_grid(self):
        """The GridDomain of this solve, built once on first use."""
        if self.grid is not None:
            return self.grid
        if self._grid_cache is None:
            from affine_vlab.numerics.geometry import build_grid
            self._grid_cache = build_grid(self.domain, self.h)
        return self._grid_cache
