"""Exception types and warnings shared across the package."""


class BeurlingError(Exception):
    """Base class for all package-specific errors."""


class DomainError(BeurlingError, ValueError):
    """Argument outside the mathematical domain (e.g. x < 1)."""


class OutOfRangeError(BeurlingError, ValueError):
    """Query beyond the truncation cutoff of the data."""


class GridMismatchError(BeurlingError, ValueError):
    """Two grid measures with incompatible step sizes."""


class MassError(BeurlingError, ValueError):
    """Measure has non-finite (or otherwise unusable) total mass."""


class NotInvertibleError(BeurlingError, ValueError):
    """Convolution inverse requested for a measure without unit atom at 1."""


class BranchCutError(BeurlingError, ValueError):
    """Evaluation point lies on a branch cut of a closed form."""


class MomentError(BeurlingError, ValueError):
    """Kernel moment capacity insufficient for the remainder growth."""


class SizeError(BeurlingError):
    """Enumeration would exceed the configured memory budget.

    The exact count bound is attached so callers can re-budget.
    """

    def __init__(self, bound, limit):
        self.bound = bound
        self.limit = limit
        super().__init__(
            f"enumeration needs {bound} atoms, exceeding the limit of {limit}"
        )


class ConfigError(BeurlingError):
    """One or more invalid configuration entries, each with a line number."""

    def __init__(self, errors):
        self.errors = list(errors)
        lines = "; ".join(f"line {ln}: {msg}" for ln, msg in self.errors)
        super().__init__(lines or "invalid configuration")


class AtomAlignmentWarning(UserWarning):
    """Atoms were snapped to the grid because the step is too coarse."""
