"""
Registry of verify checks.

Checks register themselves at import time with ``@CheckRegistry.register``;
report order is registration order.
"""
import logging
from typing import Dict, Iterable, List, Optional, Type

from affine_vlab.core.errors import ConfigValidationError
from affine_vlab.verify.base import BaseCheck

logger = logging.getLogger(__name__)

# Number of checks the suite must cover; asserted by the tests
EXPECTED_CHECKS = 19


class CheckRegistry:
    """Registry of named checks, in registration order."""

    _checks: Dict[str, Type[BaseCheck]] = {}

    @classmethod
    def register(cls, check_cls: Type[BaseCheck]) -> Type[BaseCheck]:
        if not check_cls.name:
            raise ValueError(f"{check_cls.__name__} has no name")
        if check_cls.name in cls._checks and cls._checks[check_cls.name] is not check_cls:
            raise ValueError(f"duplicate check name {check_cls.name!r}")
        cls._checks[check_cls.name] = check_cls
        return check_cls

    @classmethod
    def names(cls) -> List[str]:
        return list(cls._checks)

    @classmethod
    def count(cls) -> int:
        return len(cls._checks)

    @classmethod
    def build(cls, only: Optional[Iterable[str]] = None) -> List[BaseCheck]:
        """
        Instantiate checks in registry order.

        Args:
            only: Optional subset of check names

        Raises:
            ConfigValidationError: unknown check name
        """
        if only is None:
            return [check_cls() for check_cls in cls._checks.values()]
        wanted = list(only)
        unknown = [name for name in wanted if name not in cls._checks]
        if unknown:
            raise ConfigValidationError(f"unknown check(s): {', '.join(unknown)}; known: {', '.join(cls._checks)}")
        return [check_cls() for name, check_cls in cls._checks.items() if name in wanted]
