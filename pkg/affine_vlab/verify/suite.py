"""
Suite runner.

Builds the corpus once, runs the selected checks concurrently and returns
their reports in registry order. Check failures are data: nothing here
raises for a failed or crashing check.
"""
import logging
from typing import Iterable, List, Optional

from affine_vlab.core.errors import ConfigValidationError
from affine_vlab.core.parallel import ordered_map
from affine_vlab.schemas.reports import CheckReport
from affine_vlab.verify import checks  # noqa: F401  (registers the checks)
from affine_vlab.verify.base import SUITE_LEVELS, SuiteContext
from affine_vlab.verify.corpus import build_corpus
from affine_vlab.verify.registry import CheckRegistry

logger = logging.getLogger(__name__)


def run_suite(level: str = "fast", seed: int = 0, only: Optional[Iterable[str]] = None,
              corrupt: bool = False) -> List[CheckReport]:
    """
    Run the verify suite.

    Args:
        level: "fast" or "full"
        seed: Corpus and solver seed
        only: Optional subset of check names
        corrupt: Inject a NaN into one corpus field

    Returns:
        One CheckReport per check, in registry order

    Raises:
        ConfigValidationError: unknown level or check name
    """
    if level not in SUITE_LEVELS:
        raise ConfigValidationError(f"suite level must be one of {SUITE_LEVELS}, got {level!r}")
    selected = CheckRegistry.build(only)
    ctx = SuiteContext(level=level, seed=seed, corpus=build_corpus(seed, level, corrupt))

    logger.info(f"[Verify] running {len(selected)} check(s) at level={level} seed={seed}")
    reports = ordered_map(lambda check: check.run(ctx), selected)
    passed = sum(r.passed for r in reports)
    logger.info(f"[Verify] {passed}/{len(reports)} checks passed")
    return reports


def all_passed(reports: List[CheckReport]) -> bool:
    return all(r.passed for r in reports)


def format_report(reports: List[CheckReport]) -> str:
    """Human-readable table of the reports."""
    width = max([len(r.name) for r in reports] + [5])
    lines = [f"{'check'.ljust(width)}  status  measured          tolerance     seconds"]
    for r in reports:
        status = "pass" if r.passed else "FAIL"
        measured = f"{r.measured:.6g}" if r.measured is not None else (r.error or "-")
        lines.append(f"{r.name.ljust(width)}  {status:<6}  {measured:<16}  {r.tolerance:<12.4g}  {r.seconds:7.2f}")
        if not r.passed and r.detail:
            lines.append(f"{'':{width}}    {r.detail}")
    passed = sum(r.passed for r in reports)
    lines.append(f"{passed}/{len(reports)} checks passed")
    return "\n".join(lines)
