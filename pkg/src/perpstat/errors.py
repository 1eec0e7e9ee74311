"""Exception hierarchy.

Input problems (bad files, misaligned data, bad configuration) derive from
:class:`InputError`; the CLI maps them to exit code 2. Everything raised while
a pipeline stage is computing is wrapped in :class:`StageError` (exit code 3).
"""

from __future__ import annotations


class PerpstatError(ValueError):
    """Base class for every error raised by this package."""


class InputError(PerpstatError):
    """Problem with user-supplied data or configuration."""


class ParseError(InputError):
    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)


class IrregularSeries(InputError):
    """Timestamps are not equally spaced at the declared cadence."""


class AlignmentError(InputError):
    """Two series share no usable common timestamps."""


class MisalignedSeries(InputError):
    """Series that must share timestamps do not."""


class ConfigError(InputError):
    pass


class SeriesTooShort(PerpstatError):
    pass


class NonPositiveValue(PerpstatError):
    """A logarithm was requested of a value <= 0."""


class DegenerateSeries(PerpstatError):
    """Zero variance (or otherwise constant) input where variation is required."""


class LagTooLarge(PerpstatError):
    pass


class IncompleteWindow(PerpstatError):
    """An aggregation window is only partly covered by the data."""


class InvertedBounds(PerpstatError):
    pass


class ZeroDenominator(PerpstatError):
    pass


class RankDeficient(PerpstatError):
    pass


class Underdetermined(PerpstatError):
    pass


class NonStationary(PerpstatError):
    """A series required to be stationary still has a unit root."""


class InvalidParams(PerpstatError):
    pass


class NotConverged(PerpstatError):
    pass


class IncompleteReport(PerpstatError):
    pass


class StageError(PerpstatError):
    """Failure inside a named pipeline stage."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {type(cause).__name__}: {cause}")
