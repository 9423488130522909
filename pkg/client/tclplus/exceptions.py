"""Errors raised by tclplus.

Every error derives from :class:`TclPlusError` and from the builtin that best
describes it, so ``except ValueError`` keeps working for callers that do not
know about this package.
"""


class TclPlusError(Exception):
    """Base class for all tclplus errors."""


class InvalidMatrix(TclPlusError, ValueError):
    """Matrix has non-finite entries or is not two dimensional."""


class DimensionError(TclPlusError, ValueError):
    """Shapes do not agree with each other or with the declared space."""


class InvalidHamiltonian(TclPlusError, ValueError):
    """Hamiltonian is not Hermitian within tolerance."""


class InvalidOrder(TclPlusError, ValueError):
    """Requested expansion order is outside the supported range."""


class InsufficientSamples(TclPlusError, ValueError):
    """Too few usable samples for a fit."""


class ConfigError(TclPlusError, ValueError):
    """Configuration file cannot be read or is inconsistent."""


class SingularGenerator(TclPlusError, ArithmeticError):
    """I - Sigma(t) is singular; the TCL generator does not exist at t."""

    def __init__(self, time, determinant):
        self.time = time
        self.determinant = determinant
        super().__init__(
            f"TCL breakdown at t={time:.6g}: |det(I - Sigma)| = {determinant:.3e}"
        )


class SingularReference(TclPlusError, ArithmeticError):
    """Reference inverse for a convergence curve does not exist."""


class DivergenceDetected(TclPlusError, ArithmeticError):
    """Integrated state became non-finite."""

    def __init__(self, time, message=None):
        self.time = time
        super().__init__(message or f"Non-finite state at t={time:.6g}")


class CapacityError(TclPlusError, RuntimeError):
    """Problem is too large for the dense code path."""
