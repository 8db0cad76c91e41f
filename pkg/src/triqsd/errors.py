"""Exception hierarchy; the CLI maps these onto distinct exit codes."""


class TriqsdError(Exception):
    """Base class for all package errors."""


class ConfigError(TriqsdError):
    """Malformed or unparseable run configuration (exit code 1)."""


class ValidationError(TriqsdError, ValueError):
    """Well-formed input with invalid values or inconsistent grids (exit code 2)."""


class NumericalFault(TriqsdError):
    """Non-finite state, blow-up or factorization failure (exit code 3)."""


class KernelFactorizationError(NumericalFault):
    """Noise kernel Gram matrix is not positive semidefinite within tolerance."""


class GridAlignmentError(ValidationError):
    """A pulse time or output time is not a member of the integration grid."""
