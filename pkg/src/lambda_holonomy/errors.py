"""Exception types raised across the package."""


class LambdaHolonomyError(Exception):
    """Base class for all package errors."""


class NotAntiHermitian(LambdaHolonomyError, ValueError):
    pass


class DimensionMismatch(LambdaHolonomyError, ValueError):
    pass


class InvalidParams(LambdaHolonomyError, ValueError):
    pass


class ChartSingularity(LambdaHolonomyError, ValueError):
    """The coordinate chart of a frame or potential is singular at this point."""


class InvalidSpec(LambdaHolonomyError, ValueError):
    pass


class NotClosed(LambdaHolonomyError, ValueError):
    pass


class StepTooLarge(LambdaHolonomyError, ValueError):
    pass


class InvalidTime(LambdaHolonomyError, ValueError):
    pass


class NotNormalized(LambdaHolonomyError, ValueError):
    pass


class IoFailure(LambdaHolonomyError, OSError):
    pass
