"""Exception hierarchy shared by all modules."""


class TricomiLabError(Exception):
    """Base class for every error raised by the package."""


class DomainError(TricomiLabError, ValueError):
    """Argument outside the domain where a function is defined."""


class AccuracyError(TricomiLabError, ArithmeticError):
    """A numerical procedure failed to reach its requested tolerance.

    Attributes
    ----------
    achieved : float or None
        Best error estimate reached before giving up.
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class InputError(TricomiLabError, ValueError):
    """Input data does not satisfy an operation's preconditions."""


class ConeOverflowError(TricomiLabError):
    """The characteristic cone reaches the periodic box boundary."""


class ConeSingularityError(TricomiLabError, ValueError):
    """Kernel evaluated on (or outside) the boundary of its dependence region."""


class ConeViolationError(TricomiLabError):
    """Field mass found where a cone weight has non-positive base."""


class NoAdmissiblePairError(TricomiLabError, ValueError):
    """No (alpha, beta) pair satisfies the weighted inequality constraints."""


class UsageError(TricomiLabError, ValueError):
    """Invalid experiment configuration; ``field`` names the offending path."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
