"""Shared exception types for the sphere-sumrules package."""


class SphereSumRulesError(Exception):
    """Base class for all package errors."""


class ValidationError(SphereSumRulesError, ValueError):
    """A domain precondition on the inputs is violated."""


class DivergentSumError(SphereSumRulesError, ArithmeticError):
    """The requested sum or integral does not converge for these parameters."""


class UnsupportedOrderError(SphereSumRulesError, ValueError):
    """The requested order is outside the implemented scope (p >= 4 etc.)."""


class UnsupportedDensityError(SphereSumRulesError, ValueError):
    """The operation is not implemented for this class of densities."""


class CutoffTooSmallError(SphereSumRulesError, ValueError):
    """An internal truncation cutoff cannot accommodate the requested density."""


class NonConvergenceError(SphereSumRulesError, ArithmeticError):
    """An iterative numerical procedure failed to reach its tolerance."""
