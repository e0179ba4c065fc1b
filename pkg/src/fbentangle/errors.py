"""Exception types raised across the package."""


class FeedbackEntanglementError(Exception):
    """Base class for every error raised by this package."""


class ConvergenceError(FeedbackEntanglementError, ArithmeticError):
    def __init__(self, message, residual=float("nan")):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class NotPSDError(FeedbackEntanglementError, ValueError):
    pass


class NotPositiveError(FeedbackEntanglementError, ValueError):
    pass


class SingularLyapunovError(FeedbackEntanglementError, ArithmeticError):
    pass


class UnphysicalError(FeedbackEntanglementError, ValueError):
    pass


class UnstableError(FeedbackEntanglementError, ValueError):
    pass


class UnstableLoopError(UnstableError):
    pass


class InvalidUnravellingError(FeedbackEntanglementError, ValueError):
    pass


class ConstructionFailedError(FeedbackEntanglementError, ArithmeticError):
    pass


class MatrixFileError(FeedbackEntanglementError, ValueError):
    pass
