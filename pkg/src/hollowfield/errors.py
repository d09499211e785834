"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration problems exit with 2,
numeric failures with 3 and I/O trouble with 4.
"""


class HollowfieldError(Exception):
    """Base class for all package-specific errors."""


class DomainError(HollowfieldError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class InvalidSchemeError(HollowfieldError, ValueError):
    """A sampling-scheme definition violates its invariants."""


class SingularPointError(DomainError):
    """Evaluation was requested at (or too close to) a field singularity."""


class ShapeMismatchError(HollowfieldError, ValueError):
    """Array/grid operands do not have compatible shapes."""


class ConvergenceError(HollowfieldError, RuntimeError):
    """An iterative numerical procedure failed to converge."""


class ConfigError(HollowfieldError, ValueError):
    """An experiment configuration failed validation."""
