import logging
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional

from affine_vlab.core.errors import AffineVlabError
from affine_vlab.schemas.reports import CheckReport

logger = logging.getLogger(__name__)

SUITE_LEVELS = ("fast", "full")


@dataclass(frozen=True)
class SuiteContext:
    """Read-only inputs shared by every check of one suite run."""

    level: str
    seed: int
    corpus: object

    @property
    def full(self) -> bool:
        return self.level == "full"


@dataclass
class Measurement:
    value: float
    passed: bool
    detail: str = ""
    tolerance: Optional[float] = None


class BaseCheck(ABC):
    """
    Abstract base class that every verify check implements.

    Subclasses set ``name``, ``anchor`` (the property being checked) and
    ``tolerance`` and implement ``measure``. ``run`` never raises: any
    exception turns into a failed report naming the exception class.
    """

    name: str = ""
    anchor: str = ""
    tolerance: float = 0.0

    @abstractmethod
    def measure(self, ctx: SuiteContext) -> Measurement:
        """
        Compute the checked quantity.

        Args:
            ctx: Suite level, seed and corpus

        Returns:
            Measurement with the value, pass flag and a short detail string
        """
        pass

    def run(self, ctx: SuiteContext) -> CheckReport:
        started = time.perf_counter()
        try:
            m = self.measure(ctx)
        except AffineVlabError as e:
            logger.error(f"[Verify] {self.name} failed with {e.__class__.__name__}: {e}")
            return self._report(None, False, error=e.__class__.__name__, detail=str(e), started=started)
        except Exception as e:
            logger.exception(f"[Verify] {self.name} crashed: {e}")
            return self._report(None, False, error=e.__class__.__name__, detail=str(e), started=started)

        status = "pass" if m.passed else "FAIL"
        logger.info(f"[Verify] {self.name}: {status} measured={m.value:.6g} ({m.detail})")
        return self._report(m.value, m.passed, detail=m.detail, started=started, tolerance=m.tolerance)

    def _report(self, measured, passed, error=None, detail="", started=0.0, tolerance=None) -> CheckReport:
        return CheckReport(
            name=self.name,
            anchor=self.anchor,
            measured=measured,
            tolerance=self.tolerance if tolerance is None else tolerance,
            passed=passed,
            error=error,
            detail=detail,
            seconds=time.perf_counter() - started,
        )
