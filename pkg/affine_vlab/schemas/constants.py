from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator


class SharpConstants(BaseModel):
    """Closed-form constants for a pair (n, p)."""
    n: int
    p: float
    alpha_np: float
    k_np: Optional[float] = None
    talenti: Optional[float] = None
    mu_critical: Optional[float] = None
    omega_table: List[float]

    @model_validator(mode="after")
    def check_positive(self):
        values = [self.alpha_np, *self.omega_table]
        values += [v for v in (self.k_np, self.talenti, self.mu_critical) if v is not None]
        if any(not np.isfinite(v) or v <= 0 for v in values):
            raise ValueError("sharp constants must be finite and positive")
        return self

    def to_rows(self) -> List[tuple]:
        """(name, value) rows for the constants table."""
        rows = [("n", self.n), ("p", self.p), ("alpha_np", self.alpha_np)]
        optional = (("k_np", self.k_np), ("talenti", self.talenti), ("mu_critical", self.mu_critical))
        rows += [(name, v) for name, v in optional if v is not None]
        rows += [(f"omega_{k}", w) for k, w in enumerate(self.omega_table)]
        return rows


class ExtremalBubble(BaseModel):
    """Member a(1 + b|A(x - x0)|^{p/(p-1)})^{-(n-p)/p} of the extremal family."""
    a: float = 1.0
    b: float = Field(1.0, gt=0)
    x0: List[float]
    A: Optional[List[List[float]]] = None

    @field_validator("A")
    @classmethod
    def check_unimodular(cls, v):
        if v is None:
            return v
        mat = np.asarray(v, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("A must be a square matrix")
        if abs(np.linalg.det(mat) - 1.0) > 1e-12:
            raise ValueError(f"A must have determinant 1, got {np.linalg.det(mat):.15g}")
        return v

    @model_validator(mode="after")
    def check_shapes(self):
        if self.A is not None and len(self.A) != len(self.x0):
            raise ValueError("A and x0 dimensions differ")
        return self

    @property
    def matrix(self) -> np.ndarray:
        if self.A is None:
            return np.eye(len(self.x0))
        return np.asarray(self.A, dtype=float)
