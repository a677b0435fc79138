"""Exception hierarchy for tailforge.

Every error raised on purpose by the library derives from TailforgeError so
CLI code can map numerical failures to a dedicated exit code.
"""


class TailforgeError(Exception):
    """Base class for all tailforge errors."""


class ParameterError(TailforgeError, ValueError):
    """A constructor or operation argument violates its stated constraint."""


class TruncationError(TailforgeError):
    """A query reaches beyond the materialized part of a piecewise tail.

    Infinite piecewise constructions are cut off at the last breakpoint
    representable in binary64; evaluating past that point would silently
    fabricate asymptotics, so it is a hard error instead.
    """


class DivergenceError(TailforgeError):
    """An integral that was requested is provably infinite."""


class ToleranceError(TailforgeError):
    """Adaptive quadrature could not certify the requested tolerance."""

    def __init__(self, message: str, achieved_rel_error: float):
        super().__init__(message)
        self.achieved_rel_error = achieved_rel_error


class LogDepthError(ToleranceError):
    """An integral's log magnitude exceeds binary64 resolution (|log| beyond
    ~4.5e15), so it carries no relative structure.  Callers that only sum
    the value against much larger terms may treat it as zero; callers that
    need the log itself (ratios of deep tails) must not."""


class GridGuardError(TailforgeError):
    """A grid convolution request exceeds the configured cell budget."""


class LowAcceptanceError(TailforgeError):
    """Monte Carlo pilot acceptance below floor; use the quadrature route."""

    def __init__(self, message: str, pilot_acceptance: float):
        super().__init__(message)
        self.pilot_acceptance = pilot_acceptance


class InconclusiveBracketError(TailforgeError):
    """Interval arithmetic produced a degenerate (uninformative) bracket."""
