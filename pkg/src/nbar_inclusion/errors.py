"""Exception types raised by the package."""


class InclusionError(Exception):
    """Base class for all package errors."""


class WeightError(InclusionError, ValueError):
    """Invalid weight sequence parameters or out-of-range evaluation."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ExponentError(InclusionError, ValueError):
    """Exponents violate 1 < k <= s < infinity."""


class ConfigError(InclusionError, ValueError):
    """Malformed configuration (grids, truncation, corollary constraints)."""


class LinearOverflowError(InclusionError, OverflowError):
    """A linear-domain accessor would overflow; use the log-domain variant."""
