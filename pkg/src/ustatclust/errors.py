"""Exception and warning types shared across the package."""


class UstatClustError(ValueError):
    """Base class for all input and configuration errors raised here."""


class DimensionError(UstatClustError):
    """Vector or matrix shapes do not agree."""


class DomainError(UstatClustError):
    """A value is outside the domain an operation is defined on."""


class ValidationError(UstatClustError):
    """A structural invariant of an input object is violated."""


class TooSmallError(UstatClustError):
    """Sample too small for the requested computation."""


class UndefinedStatisticError(UstatClustError):
    """Group sizes do not admit a well-defined U-statistic."""


class InvalidMoveError(UstatClustError):
    """A search move would produce an empty group."""


class InsufficientSampleError(UstatClustError):
    """Not enough values for a stable scale estimate."""


class ConfigurationError(UstatClustError):
    """A required configuration entry (e.g. a variance) is missing."""


class ParseError(UstatClustError):
    """Malformed input file."""


class DegenerateDataWarning(UserWarning):
    """All pairwise kernel values coincide; statistics are identically zero."""


class LowDimensionWarning(UserWarning):
    """Feature dimension is small; the normal approximation may be poor."""


class SearchConsistencyWarning(UserWarning):
    """The homogeneity test rejected but no per-size candidate was significant."""


class NonMonotoneHeightWarning(UserWarning):
    """A child node's height exceeds its parent's in the dendrogram."""
