"""Exception types shared across the toolkit.

Precision problems (InsufficientPrecision) are recoverable by rebuilding the
tower at a higher working precision; certificate/congruence failures mean the
input data genuinely violates the claimed identity.
"""


class WildmonoError(Exception):
    """Base class for all toolkit errors."""


class LevelMismatch(WildmonoError):
    """Operands live at different tower levels."""


class InsufficientPrecision(WildmonoError):
    """Stored precision cannot determine the requested quantity."""


class BadUnit(WildmonoError):
    """A curve-parameter unit is neither zero nor a p-adic unit."""


class CertificateFailure(WildmonoError):
    """A valuation/slope certificate does not hold for the given data."""


class CongruenceFailure(WildmonoError):
    """A congruence check failed; carries the offending monomial degree."""

    def __init__(self, message, degree=None):
        super().__init__(message)
        self.degree = degree


class ConstraintViolation(WildmonoError):
    """Filtration/group-theoretic constraint violated; lists failed constraints."""

    def __init__(self, message, failed=()):
        super().__init__(message)
        self.failed = tuple(failed)


class NonIntegralSwan(WildmonoError):
    """The Swan conductor sum did not come out a nonnegative integer."""


class ModelFailure(WildmonoError):
    """The characteristic-p automorphism model could not be built."""


class ParseError(WildmonoError):
    """Scenario file is not valid JSON."""


class SchemaError(WildmonoError):
    """Scenario JSON parsed but does not match the expected schema."""
