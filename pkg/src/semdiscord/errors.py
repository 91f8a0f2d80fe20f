"""Exception types raised by semdiscord."""


class SemDiscordError(ValueError):
    """Base class for all errors raised by this package."""


class InvalidSeriesError(SemDiscordError):
    """The input series is empty, not one-dimensional or has non-finite values."""


class InvalidWindowError(SemDiscordError):
    """A window or length parameter is out of range for the series."""


class FlatWindowError(SemDiscordError):
    """A window with (numerically) zero standard deviation was used as a divisor."""


class InfeasiblePairError(SemDiscordError):
    """No non-flat context exists for one of the targets of a pair."""


class CalibrationError(SemDiscordError):
    """Too few usable contexts to calibrate the context-similarity threshold."""


class NoFeasibleTargetError(SemDiscordError):
    """Every target was excluded, so there is no discord to report."""


class GenerationError(SemDiscordError):
    """A synthetic series could not be generated from the given inputs."""


class MetricError(SemDiscordError):
    """An evaluation metric received an invalid interval."""
