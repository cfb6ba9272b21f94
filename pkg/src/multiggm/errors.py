"""Exception types shared across the package."""


class MultiggmError(Exception):
    """Base class for all package-specific errors."""


class NotPositiveDefinite(MultiggmError):
    """A matrix required to be positive definite is not."""


class InvalidParameter(MultiggmError):
    """A parameter is outside its valid range."""


class DimensionTooLarge(MultiggmError):
    """Exact enumeration over 2^B configurations was requested for B > 20."""


class DimensionMismatch(MultiggmError):
    """Array dimensions are inconsistent."""


class InconsistentState(MultiggmError):
    """A spike/slab coupling invariant (value = 0 iff indicator = 0) is violated."""


class DegenerateInput(MultiggmError):
    """The requested statistic is undefined for this input (e.g. constant vector)."""


class SupportLost(MultiggmError):
    """Rescaling a precision matrix drove an edge weight to exact zero."""


class ConfigError(MultiggmError):
    """A run configuration or scenario file is invalid."""


class ParseError(MultiggmError):
    """A data file could not be parsed."""


class SchemaError(MultiggmError):
    """A manifest violates its schema (e.g. group sets differ across platforms)."""


class EmptyGroup(MultiggmError):
    """A data group has fewer than two samples."""
