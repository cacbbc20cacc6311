"""Exception hierarchy shared by every module of the package."""


class ClusterAutError(Exception):
    """Base class for all package errors."""


class IntegerOverflow(ClusterAutError):
    """A matrix entry left the signed 64-bit range."""


class NotSkewSymmetrizable(ClusterAutError):
    pass


class NonExactDivision(ClusterAutError):
    """Raised when a Laurent division leaves a remainder.

    On a legal cluster mutation this can only mean a bug, since the exchange
    relation always divides exactly.
    """


class InvalidPath(ClusterAutError):
    pass


class InvalidAut(ClusterAutError):
    """The quadruple does not satisfy sigma(B_root) = sign * B_target."""


class PatternMismatch(ClusterAutError):
    """Objects from two different cluster patterns were mixed."""


class ModeUnavailable(ClusterAutError):
    pass


class ReductionFailed(ClusterAutError):
    pass


class NotFound(ClusterAutError):
    pass


class ResourceBound(ClusterAutError):
    pass


class WordSyntaxError(ClusterAutError, ValueError):
    pass
