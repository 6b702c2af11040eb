"""Exception hierarchy shared by all modules."""


class SpectralPopError(Exception):
    """Base class for every error raised by :mod:`spectralpop`."""


class DomainError(SpectralPopError, ValueError):
    """An argument lies outside the domain of a map or basis function."""


class ParameterError(SpectralPopError, ValueError):
    """A structural parameter (degree, node count, scale) is invalid."""


class SingularMatrixError(SpectralPopError, ArithmeticError):
    """A linear system has an exactly singular pivot.

    ``iteration`` is set when the failure happens inside a Newton solve.
    """

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration


class NumericError(SpectralPopError, RuntimeError):
    """A numerical procedure failed to converge."""


class StiffnessError(NumericError):
    """Adaptive step size collapsed; ``t`` is where integration stalled."""

    def __init__(self, message, t):
        super().__init__(message)
        self.t = t
