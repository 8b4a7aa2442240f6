"""Exception hierarchy shared by every module of the package."""


class PerfectMCError(Exception):
    """Base class for all errors raised by perfectmc."""


class DomainError(PerfectMCError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class InvalidDistributionError(DomainError):
    """Weights are negative or do not sum exactly to one."""


class SupportError(DomainError):
    """A support inclusion required by a distance was violated."""


class EmptySupportError(DomainError):
    """All weights are zero, so there is nothing to normalise."""


class MultiplicityError(PerfectMCError):
    """The stationary equations do not have a unique solution (reducible chain)."""


class ResourceError(PerfectMCError):
    """A configured size or bit budget was exceeded."""


class CertificateViolation(PerfectMCError):
    """A claimed mixing certificate was shown false at sampling time.

    Raised when the residual distribution has a negative entry or a
    rejection probability falls outside [0, 1].  ``state`` is the offending
    state index when one is known.
    """

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class ModelError(PerfectMCError):
    """A gallery model cannot be built from the given parameters."""
