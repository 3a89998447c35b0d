"""Exception taxonomy shared across the package.

The CLI maps these onto process exit codes: parameter and format problems
exit 2, resource guards exit 3, and a dual-engine disagreement exits 4.
"""

__all__ = [
    "FactcongError",
    "ParameterError",
    "CompositeModulusError",
    "WindowRangeError",
    "HypothesisError",
    "CacheFormatError",
    "DlogTableRequiredError",
    "TableTooLargeError",
    "GuardExceededError",
    "EngineMismatchError",
]


class FactcongError(Exception):
    """Base class for every error raised deliberately by this package."""


class ParameterError(FactcongError, ValueError):
    """A request carried values that fail validation before any work starts."""


class CompositeModulusError(ParameterError):
    """The modulus supplied for a prime field turned out not to be prime."""


class WindowRangeError(ParameterError):
    """A factorial window does not fit inside the open range (0, p)."""


class HypothesisError(ParameterError):
    """Bound parameters fall outside the regime where the bound is stated."""


class CacheFormatError(ParameterError):
    """A binary cache file failed its header, size, or sample verification."""


class DlogTableRequiredError(FactcongError):
    """An operation needs a discrete-log table that has not been built."""


class TableTooLargeError(FactcongError):
    """A lookup table would exceed the configured memory limit."""


class GuardExceededError(FactcongError):
    """Estimated work for an exhaustive engine exceeds its safety guard."""


class EngineMismatchError(FactcongError):
    """Two independent engines produced different answers for one query."""
