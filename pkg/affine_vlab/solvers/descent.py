"""
Gradient descent for scale-invariant quotients.

The iterate is renormalized after every step; since the quotient is
0-homogeneous this never changes its value. Steps start from a
Barzilai-Borwein estimate and are shortened until the Armijo condition
holds, so the accepted levels form a nonincreasing trace.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, List, Tuple

import numpy as np

logger = logging.getLogger(__name__)

Objective = Callable[[np.ndarray], Tuple[float, np.ndarray]]


@dataclass
class DescentOptions:
    max_iter: int = 20000
    tol_rel: float = 1e-8
    grad_tol: float = 1e-10
    window: int = 10
    armijo: float = 1e-4
    backtrack: float = 0.5
    max_backtracks: int = 60
    initial_step: float = 0.1

    @classmethod
    def from_config(cls, cfg, max_iter=None) -> "DescentOptions":
        return cls(
            max_iter=cfg.max_iter if max_iter is None else max_iter,
            tol_rel=cfg.tol_rel,
            grad_tol=cfg.grad_tol,
            window=cfg.window,
            armijo=cfg.armijo,
            backtrack=cfg.backtrack,
            max_backtracks=cfg.max_backtracks,
            initial_step=cfg.initial_step,
        )


@dataclass
class DescentOutcome:
    x: np.ndarray
    level: float
    trace: List[float] = field(default_factory=list)
    converged: bool = False
    iterations: int = 0
    reason: str = ""


def descend(
    fun: Objective,
    x0: np.ndarray,
    normalize: Callable[[np.ndarray], np.ndarray],
    options: DescentOptions,
    tag: str = "Descent",
) -> DescentOutcome:
    """
    Minimize a 0-homogeneous quotient from x0.

    Args:
        fun: x -> (level, gradient)
        x0: Starting point (nonzero)
        normalize: Projection onto the normalization sphere
        options: Step and stopping parameters
        tag: Log prefix

    Returns:
        DescentOutcome with the final point, level and accepted-level trace
    """
    x = normalize(np.asarray(x0, dtype=float))
    level, grad = fun(x)
    trace = [level]
    x_prev = grad_prev = None
    step = None
    quiet_steps = 0

    for it in range(1, options.max_iter + 1):
        g_norm = float(np.linalg.norm(grad))
        x_norm = float(np.linalg.norm(x))
        if g_norm <= options.grad_tol * max(abs(level), 1e-300) / x_norm:
            return DescentOutcome(x, level, trace, True, it - 1, "gradient")

        if step is None:
            step = options.initial_step * x_norm / g_norm
        else:
            s = x - x_prev
            y = grad - grad_prev
            sy = float(s @ y)
            step = float(s @ s) / sy if sy > 0 else 2.0 * step

        for _ in range(options.max_backtracks):
            candidate = normalize(x - step * grad)
            cand_level, cand_grad = fun(candidate)
            if np.isfinite(cand_level) and cand_level <= level - options.armijo * step * g_norm ** 2:
                break
            step *= options.backtrack
        else:
            logger.warning(f"[{tag}] line search stalled at iteration {it}, level={level:.12g}")
            return DescentOutcome(x, level, trace, True, it - 1, "stalled")

        change = (level - cand_level) / max(abs(cand_level), 1e-300)
        quiet_steps = quiet_steps + 1 if change < options.tol_rel else 0

        x_prev, grad_prev = x, grad
        x, level, grad = candidate, cand_level, cand_grad
        trace.append(level)

        if it % 500 == 0:
            logger.debug(f"[{tag}] iteration {it} level={level:.12g} |grad|={g_norm:.3e}")
        if quiet_steps >= options.window:
            return DescentOutcome(x, level, trace, True, it, "tol_rel")

    return DescentOutcome(x, level, trace, False, options.max_iter, "max_iter")
