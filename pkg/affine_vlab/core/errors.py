"""
Exception hierarchy for affine-vlab.

Every error carries the process exit code the CLI maps it to, so the
dispatcher can translate any library failure in one place.

Exit codes:
    0 ok, 2 parse, 3 validation, 4 numeric, 5 no-convergence, 6 verify-failure
"""


class AffineVlabError(Exception):
    """Base class for all library errors."""

    exit_code: int = 4

    def __init__(self, message: str = "", **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def __str__(self) -> str:
        return self.message or self.__class__.__name__


# ==================== Configuration ====================

class ConfigParseError(AffineVlabError):
    """Malformed config text. Carries the offending line number."""

    exit_code = 2

    def __init__(self, message: str, line: int | None = None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}", line=line)
        self.line = line


class ConfigValidationError(AffineVlabError):
    """Well-formed config that violates a parameter constraint."""

    exit_code = 3


# ==================== Numerics ====================

class NumericError(AffineVlabError):
    exit_code = 4


class EmptyDomain(NumericError):
    pass


class SingularMatrix(NumericError):
    pass


class UnsupportedShape(NumericError):
    pass


class BadCount(NumericError):
    pass


class OutOfRange(NumericError):
    pass


class NonFinite(NumericError):
    pass


class DegenerateDirection(NumericError):
    """Some Psi_xi vanished, which forces the field to be zero."""


class GridMismatch(NumericError):
    pass


class NonPositiveLevel(NumericError):
    """Computed least-energy level is <= 0 (lambda at or above the principal eigenvalue)."""


class NotRadial(NumericError):
    pass


# ==================== Solvers / verification ====================

class NoConvergence(AffineVlabError):
    exit_code = 5


class VerifyFailure(AffineVlabError):
    exit_code = 6
