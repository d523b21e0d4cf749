"""
Restart task functions executed by the worker pool.

One multi-start solve enqueues one RestartJob per initial field and the
pool runs them concurrently. Jobs share only immutable inputs (grid,
direction set, configuration); each carries its own initial field, so the
outcome of a job never depends on scheduling.

Usage:
    jobs = build_restart_jobs(quotient, cfg)
    outcomes = ordered_map(run_restart, jobs)
"""
import logging
from dataclasses import dataclass
from typing import List

import numpy as np

from affine_vlab.numerics.fields import ScalarField, band_limited_field, bump
from affine_vlab.numerics.geometry import GridDomain
from affine_vlab.solvers.descent import DescentOptions, DescentOutcome, descend

logger = logging.getLogger(__name__)


@dataclass
class RestartJob:
    seed_index: int
    kind: str
    quotient: object
    x0: np.ndarray
    options: DescentOptions


@dataclass
class RestartOutcome:
    seed_index: int
    kind: str
    outcome: DescentOutcome

    @property
    def level(self) -> float:
        return self.outcome.level


def radial_initial_field(dom: GridDomain) -> ScalarField:
    """Quadratic bump centred in the grid box, touching its nearest side."""
    span = dom.h * (np.asarray(dom.shape) - 1)
    center = dom.origin + 0.5 * span
    if dom.spec is not None and dom.spec.kind in ("ball", "ellipse", "rectangle") and np.allclose(dom.frame, np.eye(dom.dim)):
        center = np.asarray(dom.spec.center, dtype=float)
    return bump(dom, center=center, radius=0.5 * float(np.min(span)))


def initial_fields(dom: GridDomain, seed: int, restarts: int, radial_only: bool = False) -> List[tuple]:
    """
    Seeded starting fields: ``restarts`` positive smooth random fields, then
    one radial bump. Returns (seed_index, kind, field) triples.
    """
    fields = []
    if not radial_only:
        children = np.random.SeedSequence(seed).spawn(restarts)
        for index, child in enumerate(children):
            fields.append((index, "random", band_limited_field(dom, np.random.default_rng(child), positive=True)))
    bump_field = radial_initial_field(dom)
    if not np.any(bump_field.values > 0):
        # Grids too coarse for the bump start from the interior indicator
        bump_field = ScalarField(dom, np.where(dom.inside_mask, 1.0, 0.0))
    fields.append((restarts if not radial_only else 0, "radial", bump_field))
    return fields


def build_restart_jobs(quotient, cfg, max_iter=None) -> List[RestartJob]:
    options = DescentOptions.from_config(cfg, max_iter=max_iter)
    return [
        RestartJob(seed_index=index, kind=kind, quotient=quotient, x0=field.interior(), options=options)
        for index, kind, field in initial_fields(quotient.dom, cfg.seed, cfg.restarts, cfg.radial_init_only)
    ]


def run_restart(job: RestartJob) -> RestartOutcome:
    """
    Run one descent from the job's initial field.

    Args:
        job: RestartJob with quotient, start vector and options

    Returns:
        RestartOutcome wrapping the descent result
    """
    tag = f"Restart {job.seed_index}"
    outcome = descend(job.quotient, job.x0, job.quotient.normalize, job.options, tag=tag)
    logger.info(
        f"[{tag}] kind={job.kind} level={outcome.level:.12g} iterations={outcome.iterations} "
        f"converged={outcome.converged} ({outcome.reason})"
    )
    return RestartOutcome(seed_index=job.seed_index, kind=job.kind, outcome=outcome)
