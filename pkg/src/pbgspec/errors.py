"""Exception hierarchy.

Every failure the library reports derives from :class:`PbgSpecError`; the CLI
maps each concrete class to its own exit code.
"""


class PbgSpecError(Exception):
    exit_code = 1


class ValidationError(PbgSpecError, ValueError):
    """An invariant on a configuration value is violated.

    ``field`` names the offending parameter.
    """

    exit_code = 3

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class ParseError(PbgSpecError):
    exit_code = 2


class PoleAtBandEdge(PbgSpecError, ZeroDivisionError):
    exit_code = 4


class PoleAtDefect(PbgSpecError, ZeroDivisionError):
    exit_code = 5


class NonPositiveTau(PbgSpecError, ValueError):
    exit_code = 6


class DegenerateDenominator(PbgSpecError, ZeroDivisionError):
    """Spectrum denominator vanishes at ``delta_lambda``."""

    exit_code = 7

    def __init__(self, delta_lambda, message=None):
        self.delta_lambda = delta_lambda
        super().__init__(message or f"spectrum denominator vanishes at delta_lambda={delta_lambda!r}")


class StepTooLarge(PbgSpecError):
    exit_code = 8


class NormDrift(PbgSpecError):
    exit_code = 9


class GridMismatch(PbgSpecError, ValueError):
    exit_code = 10


class TruncationWarning(UserWarning):
    """Excited amplitude has not decayed by the end of the integration window."""

    def __init__(self, residual):
        self.residual = residual
        super().__init__(f"excited population {residual:.3e} left at t_max exceeds truncation threshold")
