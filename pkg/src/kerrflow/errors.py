"""Exception hierarchy shared by all kerrflow modules."""


class KerrflowError(Exception):
    """Base class for all kerrflow errors."""


class InvalidParameterError(KerrflowError, ValueError):
    """A physical parameter or configuration value is out of range."""


class ConvergenceError(KerrflowError):
    """An iterative solver failed to reach its tolerance.

    Carries the achieved residuals in ``details`` when available.
    """

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details or {}


class EscapeError(KerrflowError):
    """A mean-field trajectory left the trusted phase-space region.

    Flags parameter regimes where the bounded-flow assumption breaks down
    (or a genuine integrator failure).
    """


class TruncationError(KerrflowError):
    """The Fock-space tail check failed; a larger dimension is required."""

    def __init__(self, message, suggested_dim=None):
        super().__init__(message)
        self.suggested_dim = suggested_dim


class ResourceCapError(KerrflowError):
    """A hard resource cap (e.g. maximum Fock dimension) was exceeded."""


class DegenerateSteadyStateError(KerrflowError):
    """The Lindblad generator has (numerically) multiple steady states."""


class SpectralWeightError(KerrflowError):
    """Too few spectral modes were supplied to represent a response function."""


class ConfigError(KerrflowError):
    """A run configuration file is missing, malformed, or inconsistent."""
