"""Exception hierarchy shared by all modules."""


class FusionFrameError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(FusionFrameError, ValueError):
    pass


class AllZeroInput(FusionFrameError, ValueError):
    pass


class NotHermitian(FusionFrameError, ValueError):
    pass


class NotPositiveDefinite(FusionFrameError, ValueError):
    pass


class NumericalFailure(FusionFrameError, ArithmeticError):
    pass


class NotAFrame(FusionFrameError, ValueError):
    """The lower frame bound vanishes at the working tolerance."""


class CountMismatch(FusionFrameError, ValueError):
    pass


class NotRieszBasis(FusionFrameError, ValueError):
    pass


class SingularOperator(FusionFrameError, ValueError):
    pass


class InvalidP(FusionFrameError, ValueError):
    pass


class LocalVectorOutsideSubspace(FusionFrameError, ValueError):
    pass


class IndexMismatch(FusionFrameError, ValueError):
    pass


class InvalidLevels(FusionFrameError, ValueError):
    pass


class LevelMismatch(FusionFrameError, ValueError):
    pass


class Inconsistent(FusionFrameError):
    """The right-hand side is not in the range of the operator.

    The least-squares solution and its residual are attached so callers
    can still report them.
    """

    def __init__(self, message, f=None, residual=None):
        super().__init__(message)
        self.f = f
        self.residual = residual
