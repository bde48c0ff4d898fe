"""Exception types shared across the package."""


class RicciflowError(Exception):
    """Base class for all errors raised by this package."""


class SingularMatrix(RicciflowError):
    """A matrix failed the singularity test (degenerate frame)."""


class NotSymmetric(RicciflowError):
    """Input to the symmetric eigensolver is not symmetric."""


class UnknownPreset(RicciflowError):
    """Requested algebra preset name is not in the catalog."""


class InvalidConfig(RicciflowError):
    """Flow configuration or initial data violates its invariants."""


class DomainError(RicciflowError):
    """Closed-form expression evaluated outside its valid domain."""
