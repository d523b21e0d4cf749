"""
Result records produced by the numerics, solvers and verify suite.

Records holding grid fields allow arbitrary types; everything written to
disk goes through ``to_row`` so the CSV column order lives next to the data.
"""
from typing import Any, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field


class EnergyReport(BaseModel):
    """Psi values, affine energy and gradient norm of one field."""
    n: int
    p: float
    m: int
    psi: List[float]
    energy: float
    grad_norm: float
    min_psi: float
    degenerate: bool

    @staticmethod
    def columns() -> List[str]:
        return ["n", "p", "m", "E", "grad_norm", "min_psi", "degenerate"]

    def to_row(self) -> list:
        return [self.n, self.p, self.m, self.energy, self.grad_norm, self.min_psi, int(self.degenerate)]


class CheckReport(BaseModel):
    """Outcome of one verify check."""
    name: str
    anchor: str
    measured: Optional[float] = None
    tolerance: float
    passed: bool
    error: Optional[str] = None
    detail: str = ""
    seconds: float = 0.0

    @staticmethod
    def columns() -> List[str]:
        return ["name", "anchor", "measured", "tolerance", "passed", "error"]

    def to_row(self) -> list:
        measured = "" if self.measured is None else self.measured
        return [self.name, self.anchor, measured, self.tolerance, int(self.passed), self.error or ""]


class EigenResult(BaseModel):
    """Principal eigenvalue estimate and its nonnegative L^p-normalized eigenfunction."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    eigenvalue: float = Field(..., ge=0)
    eigenfunction: Any
    trace: List[float]
    energy_kind: str = "affine"
    seed_index: int = 0
    alternates: List[Tuple[int, float]] = Field(default_factory=list)
    converged: bool = True


class SolveResult(BaseModel):
    """Least-energy level, normalized minimizer and rescaled solution."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    level: float
    minimizer: Any
    rescaled_solution: Any = None
    el_residual: Optional[float] = None
    trace: List[float]
    positivity_fraction: float
    positivity_ok: bool
    mu: Optional[float] = None
    energy_kind: str = "affine"
    seed_index: int = 0
    alternates: List[Tuple[int, float]] = Field(default_factory=list)
    converged: bool = True
    p: float = 2.0
    q: float = 4.0
    lambda_: float = 0.0

    @property
    def rescale(self) -> float:
        return rescale_factor(self.level, self.p, self.q)


def rescale_factor(level: float, p: float, q: float) -> float:
    """c^{1/(q-p)}, the factor turning a normalized minimizer into a solution."""
    return float(level ** (1.0 / (q - p)))
