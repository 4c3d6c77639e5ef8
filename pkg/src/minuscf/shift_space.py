"""Symbol sequences of the map: admissibility, shift, metric, itineraries.

A genuine symbol stream never contains the two-digit blocks 24, 42, 00 or
the three-digit blocks 202, 404; the all-zero stream is reserved for
infinity, so 00 may only occur where the stream has become zero forever.
:class:`Itinerary` enforces those rules at construction, while
:func:`is_admissible` reports on raw words without raising.

Itineraries are stored canonically: the periodic tail is primitive and
pulled as far left as possible, and a head before the infinity tail never
keeps trailing zeros (they belong to the tail).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    EmptyItineraryError,
    InadmissibleItineraryError,
    NumberParseError,
)
from .gamma_map import OrbitConfig, Symbol, orbit
from .numbers import ExtReal, Infinity

__all__ = [
    "AdmissibilityReport",
    "Itinerary",
    "distance",
    "is_admissible",
    "itinerary",
    "itinerary_from_text",
    "itinerary_to_text",
    "shift",
]


def _coerce(symbols: Iterable) -> tuple[Symbol, ...]:
    return tuple(Symbol(s) for s in symbols)


def _primitive(word: tuple[Symbol, ...]) -> tuple[Symbol, ...]:
    n = len(word)
    for length in range(1, n + 1):
        if n % length == 0 and word[:length] * (n // length) == word:
            return word[:length]
    return word


@dataclass(frozen=True)
class AdmissibilityReport:
    ok: bool
    violation: tuple[int, str] | None = None
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class Itinerary:
    """A finite symbol word plus an optional periodic or infinity tail.

    ``period`` nonempty means the head is followed by that word forever;
    ``to_infinity`` means the head is followed by zeros forever; neither
    means the itinerary is a finite sample of unknown continuation.
    """

    head: tuple[Symbol, ...]
    period: tuple[Symbol, ...] = ()
    to_infinity: bool = False

    def __post_init__(self):
        head = _coerce(self.head)
        period = _coerce(self.period)
        if period and self.to_infinity:
            raise ValueError("an itinerary has at most one tail")
        if period:
            period = _primitive(period)
            if all(s is Symbol.S0 for s in period):
                raise ValueError("all-zero period is the infinity tail")
            while head and head[-1] == period[-1]:
                head = head[:-1]
                period = (period[-1],) + period[:-1]
        if self.to_infinity:
            while head and head[-1] is Symbol.S0:
                head = head[:-1]
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "period", period)
        report = is_admissible(head, period, self.to_infinity)
        if not report.ok:
            pos, block = report.violation
            raise InadmissibleItineraryError(block, pos)

    @property
    def is_finite_sample(self) -> bool:
        return not self.period and not self.to_infinity

    def symbol_at(self, i: int) -> Symbol:
        if i < 0:
            raise IndexError(i)
        if i < len(self.head):
            return self.head[i]
        if self.period:
            return self.period[(i - len(self.head)) % len(self.period)]
        if self.to_infinity:
            return Symbol.S0
        raise ValueError(f"finite sample of length {len(self.head)} undefined at {i}")

    def prefix(self, n: int) -> tuple[Symbol, ...]:
        return tuple(self.symbol_at(i) for i in range(n))

    def defined_length(self) -> int | None:
        """Length of the defined prefix; None when infinite."""
        if self.is_finite_sample:
            return len(self.head)
        return None

    def __str__(self):
        return itinerary_to_text(self)


# ---------------------------------------------------------------------------
# admissibility


_PAIR_BLOCKS = {
    (Symbol.S2, Symbol.S4): "24",
    (Symbol.S4, Symbol.S2): "42",
}


def _scan_blocks(word: Sequence[Symbol], limit: int) -> tuple[int, str] | None:
    """First forbidden 24/42/202/404 window starting before ``limit``."""
    for i in range(min(limit, len(word) - 1)):
        pair = (word[i], word[i + 1])
        if pair in _PAIR_BLOCKS:
            return (i, _PAIR_BLOCKS[pair])
    for i in range(min(limit, len(word) - 2)):
        a, b, c = word[i], word[i + 1], word[i + 2]
        if b is Symbol.S0 and a is not Symbol.S0 and a == c:
            return (i, f"{a}0{c}")
    return None


def is_admissible(
    head: Sequence[Symbol | int],
    period: Sequence[Symbol | int] = (),
    to_infinity: bool = False,
) -> AdmissibilityReport:
    """Scan every length-2 and length-3 window, junctions included.

    00 is allowed only where the stream is zero forever: in the trailing
    zero run of a finite sample or entering the infinity tail.  A periodic
    cycle with fewer than two zeros is reported as a warning, not an error.
    """
    head = _coerce(head)
    period = _coerce(period)
    if period and to_infinity:
        raise ValueError("at most one tail")
    warnings: list[str] = []
    if period:
        # Three copies cover every window across head-tail and wrap junctions.
        word = head + period * 3
        hit = _scan_blocks(word, len(head) + 2 * len(period))
        if hit is None:
            for i in range(len(head) + 2 * len(period)):
                if word[i] is Symbol.S0 and word[i + 1] is Symbol.S0:
                    hit = (i, "00")
                    break
        if hit:
            return AdmissibilityReport(False, hit)
        if sum(1 for s in period if s is Symbol.S0) < 2:
            warnings.append("periodic cycle contains fewer than two zeros")
        return AdmissibilityReport(True, warnings=tuple(warnings))

    hit = _scan_blocks(head, len(head))
    if hit:
        return AdmissibilityReport(False, hit)
    # locate the first 00; afterwards only zeros may follow
    for i in range(len(head) - 1):
        if head[i] is Symbol.S0 and head[i + 1] is Symbol.S0:
            tail_pos = next(
                (j for j in range(i, len(head)) if head[j] is not Symbol.S0), None
            )
            if tail_pos is not None:
                block = "nonzero-after-inf-tail" if to_infinity else "00"
                return AdmissibilityReport(False, (i if block == "00" else tail_pos, block))
            break
    return AdmissibilityReport(True)


# ---------------------------------------------------------------------------
# operations


def itinerary(x: ExtReal, length: int, cfg: OrbitConfig = OrbitConfig()) -> Itinerary:
    """Symbols of orbit steps 0..length-1.

    If the orbit reaches infinity inside the window the result carries the
    infinity tail and the head stops at the last nonzero symbol.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    steps = orbit(x, length - 1, cfg)
    symbols: list[Symbol] = []
    hit_infinity = False
    for step in steps:
        if isinstance(step.value, Infinity):
            hit_infinity = True
            break
        symbols.append(step.symbol)
    return Itinerary(tuple(symbols), to_infinity=hit_infinity)


def shift(it: Itinerary) -> Itinerary:
    """Drop the first symbol, rotating a periodic tail as needed."""
    if it.head:
        return Itinerary(it.head[1:], it.period, it.to_infinity)
    if it.period:
        return Itinerary((), it.period[1:] + it.period[:1])
    if it.to_infinity:
        return it
    raise EmptyItineraryError("cannot shift an empty finite itinerary")


def distance(s: Itinerary, t: Itinerary, horizon: int) -> Fraction:
    """Exact metric sum_{i<horizon} |idx(s_i) - idx(t_i)| / 3**i.

    Symbols are compared through their contiguous indices 0, 1, 2 so that
    one disagreement costs at most 2/3**i.  Both itineraries must be
    defined up to the horizon.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    total = Fraction(0)
    power = Fraction(1)
    for i in range(horizon):
        total += Fraction(abs(s.symbol_at(i).index - t.symbol_at(i).index)) * power
        power /= 3
    return total


# ---------------------------------------------------------------------------
# text format: digits, optional "(...)*" periodic tail or "0..." infinity tail


_TEXT_RE = re.compile(r"([024]*)(?:\(([024]+)\)\*)?\Z")


def itinerary_to_text(it: Itinerary) -> str:
    head = "".join(str(s) for s in it.head)
    if it.period:
        return f"{head}({''.join(str(s) for s in it.period)})*"
    if it.to_infinity:
        return f"{head}0..."
    return head


def itinerary_from_text(text: str) -> Itinerary:
    compact = "".join(text.split())
    if compact.endswith("..."):
        digits = compact[:-3]
        if not digits or not set(digits) <= set("024") or digits[-1] != "0":
            raise NumberParseError("malformed infinity-tail itinerary", text)
        head = tuple(Symbol(int(c)) for c in digits.rstrip("0"))
        return Itinerary(head, to_infinity=True)
    m = _TEXT_RE.fullmatch(compact)
    if not m or (not m.group(1) and not m.group(2)):
        raise NumberParseError("malformed itinerary", text)
    head = tuple(Symbol(int(c)) for c in m.group(1))
    period = tuple(Symbol(int(c)) for c in m.group(2)) if m.group(2) else ()
    return Itinerary(head, period)
