"""Exception types raised across the package."""


class ArakiError(Exception):
    """Base class for all package errors."""


class NonConvergence(ArakiError):
    """The eigensolver failed on the given input."""


class DimensionMismatch(ArakiError, ValueError):
    pass


class ShapeMismatch(ArakiError, ValueError):
    pass


class NotHermitian(ArakiError, ValueError):
    pass


class DomainError(ArakiError, ValueError):
    """A spectral value lies outside the domain of the applied function."""


class SingularPower(DomainError):
    pass


class SingularLog(DomainError):
    pass


class NotPSD(DomainError):
    pass


class HypothesisViolated(ArakiError, ValueError):
    """The test case does not satisfy the hypotheses of the checked statement.

    This flags a bad input, never a counterexample.
    """


class CorruptState(ArakiError):
    pass
