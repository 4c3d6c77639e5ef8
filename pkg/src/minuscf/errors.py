"""Exception types shared across the package."""


class MinusCFError(Exception):
    """Base class for package-specific failures."""


class NumberParseError(MinusCFError, ValueError):
    """A number, itinerary, or continued-fraction literal failed to parse."""

    def __init__(self, message: str, token: str | None = None):
        super().__init__(message if token is None else f"{message}: {token!r}")
        self.token = token


class UnsupportedRadicandError(MinusCFError, ValueError):
    """A radicand was negative or too large to certify squarefree."""


class NotExactError(MinusCFError, TypeError):
    """An exact-only operation received an interval-backed value."""


class PrecisionUnavailableError(MinusCFError, RuntimeError):
    """A refinement generator could not reach the requested enclosure width."""


class BoundaryUnresolvableError(MinusCFError, RuntimeError):
    """An enclosure still straddles a partition boundary at the bit ceiling.

    Exact backends never raise this; it signals that an interval value needs
    more precision than the configured maximum to certify a symbol.
    """

    def __init__(self, boundary, step: int | None = None, bits: int | None = None):
        self.boundary = boundary
        self.step = step
        self.bits = bits
        where = "" if step is None else f" at step {step}"
        super().__init__(
            f"enclosure still straddles {boundary}{where} after refining to {bits} bits"
        )


class EmptyItineraryError(MinusCFError, ValueError):
    """shift() was applied to an empty finite itinerary."""


class InadmissibleItineraryError(MinusCFError, ValueError):
    """A symbol word contains a forbidden block."""

    def __init__(self, block: str, position: int):
        self.block = block
        self.position = position
        super().__init__(f"forbidden block {block!r} at position {position}")


class InconsistentCFError(MinusCFError, ValueError):
    """Continued-fraction terms whose reconstruction violates admissibility."""


class NotHyperbolicError(MinusCFError, ValueError):
    """The periodic part's matrix has no pair of irrational real fixed points."""


class MaxStepsExceededError(MinusCFError, RuntimeError):
    """An iteration exhausted its step budget (a resource limit, never a proof)."""

    def __init__(self, message: str, last_state=None):
        super().__init__(message)
        self.last_state = last_state


class NothingToPlotError(MinusCFError, ValueError):
    """Fewer than two finite orbit points were supplied to the plotter."""
