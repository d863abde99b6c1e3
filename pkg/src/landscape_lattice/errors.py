"""Exception hierarchy shared by every module."""


class LandscapeError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(LandscapeError, ValueError):
    pass


class SingularMatrix(LandscapeError, ArithmeticError):
    pass


class NotSymmetric(LandscapeError, ValueError):
    pass


class NoConvergence(LandscapeError, ArithmeticError):
    pass


class ConditionViolated(LandscapeError):
    """The potential does not dominate the hopping sum and no override was given."""


class ContractionFailure(LandscapeError, ArithmeticError):
    """The Neumann contraction factor is not below one."""


class NonPositiveSpectrum(LandscapeError, ArithmeticError):
    """A non-positive eigenvalue showed up where positivity is guaranteed."""


class IndexOutOfRange(LandscapeError, ValueError):
    pass


class InvalidSpec(LandscapeError, ValueError):
    pass


class VerificationFailed(LandscapeError, AssertionError):
    """A numerical identity that should hold exactly or to tolerance did not."""
