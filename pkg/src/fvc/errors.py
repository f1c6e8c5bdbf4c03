"""Exception hierarchy shared by the pipeline stages."""


class FvcError(Exception):
    """Base class for pipeline failures."""

    exit_code = 1


class DegenerateConfiguration(FvcError, ValueError):
    """Point configuration admits no unique solution (collinear, coincident, ...)."""


class NoFrameFound(FvcError):
    exit_code = 2


class DegenerateRect(DegenerateConfiguration):
    exit_code = 2


class NoLinesFound(FvcError):
    exit_code = 3


class InsufficientLines(FvcError):
    exit_code = 4


class ParallelInnerLines(InsufficientLines):
    pass


class EmptySegment(FvcError, ValueError):
    pass
