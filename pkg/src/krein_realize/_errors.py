"""Exception hierarchy shared by all modules of :mod:`krein_realize`."""

__all__ = [
    "KreinRealizeError",
    "ArgumentError",
    "FieldError",
    "ConvergenceError",
    "PairingError",
    "DivergenceError",
    "ConfigError",
]


class KreinRealizeError(Exception):
    """Base class for all errors raised by this package."""


class ArgumentError(KreinRealizeError, ValueError):
    """An argument violates a documented precondition."""


class FieldError(ArgumentError):
    """Operands live over incompatible scalar fields, or the requested
    operation is not defined over the given field."""


class ConvergenceError(KreinRealizeError, RuntimeError):
    """An iterative computation failed to reach its tolerance."""


class PairingError(ConvergenceError):
    """Eigenvalues of an embedded quaternionic problem failed to pair up.

    Carries the offending spectrum in :attr:`spectrum` so the caller can
    inspect how far from doubled the eigenvalues were.
    """

    def __init__(self, message, spectrum=None):
        super().__init__(message)
        self.spectrum = spectrum


class DivergenceError(KreinRealizeError, ArithmeticError):
    """A series or resolvent was requested outside its convergence region."""


class ConfigError(KreinRealizeError, ValueError):
    """A run configuration failed to parse or validate.

    Messages are path-qualified (``coeffs[1][0][0]: ...``) so the offending
    entry can be located in the JSON document.
    """
