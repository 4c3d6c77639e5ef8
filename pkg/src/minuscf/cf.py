"""Minus continued fractions: extraction, run-length codec, evaluation.

A minus continued fraction a0 - 1/(a1 - 1/(a2 - ...)) is the arithmetic
shadow of an orbit: a positive term +m is a maximal run of m symbols 4,
a negative term -m a maximal run of m symbols 2, and single zeros separate
the runs.  A finite expansion pairs with the infinity tail; a periodic
expansion pairs with a periodic itinerary; a truncated expansion pairs
with a finite symbol sample.

Terms are canonical the same way itineraries are: the periodic part is
primitive and absorbed as far left as possible, so equal expansions
compare equal.  An empty finite expansion denotes infinity (the empty
matrix product sends infinity to itself).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import (
    BoundaryUnresolvableError,
    InconsistentCFError,
    MaxStepsExceededError,
    NotHyperbolicError,
    NumberParseError,
)
from .gamma_map import OrbitConfig, Symbol, classify, f_gamma
from .numbers import (
    INFINITY,
    CertifiedReal,
    ExtReal,
    Infinity,
    QuadraticSurd,
    Rational,
    add_int,
    neg_recip,
    state_key,
    surd_floor,
    surd_normalize,
)
from .shift_space import Itinerary

__all__ = [
    "Convergent",
    "MinusCF",
    "MobiusMatrix",
    "cf_extract",
    "cf_from_text",
    "cf_to_itinerary",
    "cf_to_text",
    "evaluate",
    "itinerary_to_cf",
    "periodic_cf_to_surd",
]


def _primitive_terms(word: tuple[int, ...]) -> tuple[int, ...]:
    n = len(word)
    for length in range(1, n + 1):
        if n % length == 0 and word[:length] * (n // length) == word:
            return word[:length]
    return word


@dataclass(frozen=True)
class MinusCF:
    """Terms a0, a1, ... with an optional periodic tail or truncation mark.

    ``period`` nonempty: the terms continue with that cycle forever.
    ``truncated``: the expansion continues but is unknown past ``terms``.
    Neither: the expansion is finite and exact (the value is rational, or
    infinity when ``terms`` is empty).
    """

    terms: tuple[int, ...]
    period: tuple[int, ...] = ()
    truncated: bool = False

    def __post_init__(self):
        terms = tuple(int(a) for a in self.terms)
        period = tuple(int(b) for b in self.period)
        if period and self.truncated:
            raise ValueError("a continued fraction has at most one tail")
        if any(a == 0 for a in terms[1:]) or any(b == 0 for b in period):
            raise ValueError("terms after a0 must be nonzero")
        if period:
            period = _primitive_terms(period)
            while terms and terms[-1] == period[-1]:
                terms = terms[:-1]
                period = (period[-1],) + period[:-1]
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "period", period)

    def term_at(self, k: int) -> int:
        if k < len(self.terms):
            return self.terms[k]
        if self.period:
            return self.period[(k - len(self.terms)) % len(self.period)]
        raise ValueError(f"term {k} is not available")

    def available(self, n: int) -> bool:
        return bool(self.period) or n <= len(self.terms)

    def __str__(self):
        return cf_to_text(self)


@dataclass(frozen=True)
class MobiusMatrix:
    """Integer 2x2 matrix acting by (a x + b)/(c x + d)."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a == self.b == self.c == self.d == 0:
            raise ValueError("zero matrix")

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "MobiusMatrix") -> "MobiusMatrix":
        return MobiusMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    @classmethod
    def term(cls, a: int) -> "MobiusMatrix":
        """Factor [[a, -1], [1, 0]]: x -> a - 1/x.  Determinant +1."""
        return cls(a, -1, 1, 0)


@dataclass(frozen=True)
class Convergent:
    """Value p/q of a truncated expansion; q = 0 marks a pole (infinity)."""

    p: int
    q: int

    def as_extreal(self) -> ExtReal:
        return INFINITY if self.q == 0 else Rational(self.p, self.q)

    def as_fraction(self) -> Fraction:
        if self.q == 0:
            raise ZeroDivisionError("pole convergent has no finite value")
        return Fraction(self.p, self.q)


# ---------------------------------------------------------------------------
# extraction


def _trunc_exact(x: ExtReal) -> int:
    """Integer part toward zero of an exact finite value."""
    if isinstance(x, Rational):
        return int(Fraction(x.num, x.den))
    if isinstance(x, QuadraticSurd):
        n = surd_floor(x)
        return n + 1 if n < 0 else n  # floor < x < floor+1, x irrational
    raise TypeError(f"no exact truncation for {x!r}")


def _trunc_certified(x: CertifiedReal, max_bits: int, term_index: int) -> tuple[int, CertifiedReal]:
    # int() on Fraction truncates toward zero; truncation is monotone, so
    # equal endpoint truncations certify the whole enclosure.
    cur = x
    while True:
        lo_t, hi_t = int(cur.lo), int(cur.hi)
        if lo_t == hi_t:
            return lo_t, cur
        if cur.bits >= max_bits:
            raise BoundaryUnresolvableError(hi_t, term_index, cur.bits)
        cur = cur.at_bits(min(2 * cur.bits, max_bits))


def cf_extract(x: ExtReal, k_terms: int, cfg: OrbitConfig = OrbitConfig()) -> MinusCF:
    """First k_terms terms of the minus continued fraction of x.

    Each term is the integer part taken toward zero, equivalently the
    signed length of the corresponding orbit run.  Rational inputs end in
    a finite expansion; everything else is truncated at k_terms.
    """
    if isinstance(x, Infinity):
        raise ValueError("infinity has no continued fraction expansion")
    if k_terms < 1:
        raise ValueError("k_terms must be >= 1")
    terms: list[int] = []
    r = x
    for k in range(k_terms):
        if isinstance(r, CertifiedReal):
            a, r = _trunc_certified(r, cfg.max_bits, k)
        else:
            a = _trunc_exact(r)
        if abs(a) > cfg.max_steps:
            raise MaxStepsExceededError(
                f"term {k} has magnitude {abs(a)} exceeding max_steps", last_state=r
            )
        terms.append(a)
        frac = add_int(r, -a)
        if isinstance(frac, Rational) and frac.num == 0:
            return MinusCF(tuple(terms))
        r = neg_recip(frac)
    return MinusCF(tuple(terms), truncated=True)


# ---------------------------------------------------------------------------
# run-length codec


def _run(a: int) -> tuple[Symbol, ...]:
    return (Symbol.S4,) * a if a > 0 else (Symbol.S2,) * (-a)


def _parse_runs(word: Sequence[Symbol], leading_zero_is_a0: bool) -> list[int]:
    """Run-length encode a word of complete runs separated by single zeros."""
    terms: list[int] = []
    i = 0
    if leading_zero_is_a0 and word and word[0] is Symbol.S0:
        terms.append(0)
        i = 1
    while i < len(word):
        sym = word[i]
        if sym is Symbol.S0:
            raise InconsistentCFError(f"unexpected separator at position {i}")
        j = i
        while j < len(word) and word[j] == sym:
            j += 1
        length = j - i
        terms.append(length if sym is Symbol.S4 else -length)
        i = j
        if i < len(word):
            if word[i] is not Symbol.S0:
                raise InconsistentCFError(f"missing separator at position {i}")
            i += 1
    return terms


def itinerary_to_cf(it: Itinerary) -> MinusCF:
    """Run-length encode an itinerary into minus-continued-fraction terms.

    Finite samples yield a truncated expansion whose last term reflects the
    possibly incomplete final run; a dangling separator at the end of a
    sample is dropped.  The infinity tail closes the expansion exactly.
    """
    if it.period:
        return _periodic_itinerary_to_cf(it)
    word = it.head
    if it.to_infinity:
        if not word:
            return MinusCF(())  # the all-zero stream is infinity itself
        return MinusCF(tuple(_parse_runs(word, leading_zero_is_a0=True)))
    if not word:
        raise ValueError("empty finite itinerary has no expansion")
    zeros = 0
    while zeros < len(word) and word[-1 - zeros] is Symbol.S0:
        zeros += 1
    if zeros >= 2:
        # trailing 00: the stream has hit zero and stays there
        return MinusCF(tuple(_parse_runs(word[:-zeros], leading_zero_is_a0=True)))
    if zeros == 1:
        if len(word) == 1:
            return MinusCF((0,), truncated=True)  # lone 0: unknown continuation
        word = word[:-1]  # dangling separator promises an unseen run
    return MinusCF(tuple(_parse_runs(word, leading_zero_is_a0=True)), truncated=True)


def _periodic_itinerary_to_cf(it: Itinerary) -> MinusCF:
    head, period = it.head, it.period
    length = len(period)
    if Symbol.S0 not in period:
        raise InconsistentCFError("periodic tail without separators encodes no terms")
    word = head + period * 3
    # First zero at or past the head; the position after it starts a run and
    # one full itinerary period from there spans whole runs.
    z = next(i for i in range(len(head), len(head) + length) if word[i] is Symbol.S0)
    j = z + 1
    before = word[: j - 1]  # leading runs, the zero at z closing the last one
    lead_terms = _parse_runs(before, leading_zero_is_a0=True) if before else [0]
    cycle = word[j : j + length]
    assert cycle[-1] is Symbol.S0
    cycle_terms = _parse_runs(cycle[:-1], leading_zero_is_a0=False)
    return MinusCF(tuple(lead_terms), tuple(cycle_terms))


def cf_to_itinerary(cf: MinusCF) -> Itinerary:
    """Rebuild the itinerary of an expansion; raises on forbidden blocks."""
    head: list[Symbol] = []
    for k, a in enumerate(cf.terms):
        if k == 0:
            head.extend(_run(a) if a != 0 else (Symbol.S0,))
            continue
        if not (k == 1 and cf.terms[0] == 0):
            head.append(Symbol.S0)  # the a0 = 0 marker doubles as separator
        head.extend(_run(a))
    try:
        if cf.period:
            tail: list[Symbol] = []
            for b in cf.period:
                tail.append(Symbol.S0)
                tail.extend(_run(b))
            if not cf.terms:
                # purely periodic: phase the cycle to start with its first run
                return Itinerary((), tuple(tail[1:] + tail[:1]))
            if cf.terms == (0,):
                # the a0 = 0 marker is the first cycle separator itself
                return Itinerary((), tuple(tail))
            return Itinerary(tuple(head), tuple(tail))
        if cf.truncated:
            return Itinerary(tuple(head))
        return Itinerary(tuple(head), to_infinity=True)
    except InconsistentCFError:
        raise
    except Exception as exc:
        raise InconsistentCFError(f"terms rebuild a forbidden block: {exc}") from exc


# ---------------------------------------------------------------------------
# evaluation


def evaluate(cf: MinusCF, n: int) -> list[Convergent]:
    """Convergents of the first n terms via the three-term recurrence.

    p_k = a_k p_{k-1} - p_{k-2}, q_k likewise, seeded by the identity
    matrix, so p_k q_{k-1} - p_{k-1} q_k = -1 throughout.  A convergent
    with q = 0 is a pole: the truncation at that depth equals infinity.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if not cf.available(n):
        raise ValueError(f"only {len(cf.terms)} terms available, {n} requested")
    out: list[Convergent] = []
    p_prev, p_prev2 = 1, 0
    q_prev, q_prev2 = 0, -1
    for k in range(n):
        a = cf.term_at(k)
        p = a * p_prev - p_prev2
        q = a * q_prev - q_prev2
        out.append(Convergent(p, q))
        p_prev2, p_prev = p_prev, p
        q_prev2, q_prev = q_prev, q
    return out


def cf_value(cf: MinusCF) -> ExtReal:
    """Exact value of a finite or periodic expansion."""
    if cf.truncated:
        raise ValueError("a truncated expansion has no exact value")
    if cf.period:
        return periodic_cf_to_surd(cf)
    if not cf.terms:
        return INFINITY
    return evaluate(cf, len(cf.terms))[-1].as_extreal()


# ---------------------------------------------------------------------------
# periodic expansions and quadratic surds


def _cycle_matrix(period: Sequence[int]) -> MobiusMatrix:
    m = MobiusMatrix(1, 0, 0, 1)
    for b in period:
        m = m @ MobiusMatrix.term(b)
    return m


def _expected_cycle_word(period: Sequence[int]) -> tuple[Symbol, ...]:
    word: list[Symbol] = []
    for b in period:
        word.extend(_run(b))
        word.append(Symbol.S0)
    return tuple(word)


def _reproduces_cycle(y: QuadraticSurd, word: tuple[Symbol, ...]) -> bool:
    cur: ExtReal = y
    for expected in word:
        if isinstance(cur, Infinity) or classify(cur) != expected:
            return False
        cur = f_gamma(cur)
    return not isinstance(cur, Infinity) and state_key(cur) == state_key(y)


def periodic_cf_to_surd(cf: MinusCF) -> QuadraticSurd:
    """Exact quadratic surd value of a periodic expansion.

    The periodic part's matrix M = prod [[b, -1], [1, 0]] fixes the tail
    value y, giving C y^2 + (D - A) y - B = 0.  The root is selected by
    re-encoding: the winner reproduces the cycle's symbol word and returns
    to itself exactly.  The leading terms then fold back via y -> a - 1/y.
    """
    if not cf.period:
        raise ValueError("expansion has no periodic tail")
    m = _cycle_matrix(cf.period)
    a_, b_, c_, d_ = m.a, m.b, m.c, m.d
    if c_ == 0:
        raise NotHyperbolicError("cycle matrix fixes no irrational point")
    disc = (d_ - a_) ** 2 + 4 * c_ * b_
    if disc <= 0:
        raise NotHyperbolicError(f"cycle matrix discriminant {disc} is not positive")
    word = _expected_cycle_word(cf.period)
    root = None
    for sign in (1, -1):
        cand = surd_normalize(a_ - d_, sign, 2 * c_, disc)
        if isinstance(cand, QuadraticSurd) and _reproduces_cycle(cand, word):
            root = cand
            break
    if root is None:
        raise InconsistentCFError(
            "neither fixed point re-encodes to the periodic terms"
        )
    value: ExtReal = root
    for a in reversed(cf.terms):
        value = add_int(neg_recip(value), a)
    assert isinstance(value, QuadraticSurd)
    return value


# ---------------------------------------------------------------------------
# text format: [a0; a1 : a2 : ...] with optional (b1 : ... : bm)* suffix


def cf_to_text(cf: MinusCF) -> str:
    parts = [str(a) for a in cf.terms]
    if cf.period:
        parts.append("(" + " : ".join(str(b) for b in cf.period) + ")*")
    if not parts:
        return "[]"
    if len(parts) == 1:
        return f"[{parts[0]}]"
    return f"[{parts[0]}; " + " : ".join(parts[1:]) + "]"


_CF_PERIOD_RE = re.compile(r"\(([^()]*)\)\*\Z")


def cf_from_text(text: str) -> MinusCF:
    compact = text.strip()
    if not (compact.startswith("[") and compact.endswith("]")):
        raise NumberParseError("continued fraction must be bracketed", text)
    body = compact[1:-1].strip()
    if not body:
        return MinusCF(())
    head, _, rest = body.partition(";")
    pieces = [head.strip()] if not rest else [head.strip()] + [
        s.strip() for s in rest.split(":")
    ]
    # re-join a periodic group split on its internal colons
    joined: list[str] = []
    group: list[str] | None = None
    for piece in pieces:
        if group is not None:
            group.append(piece)
            if piece.endswith(")*"):
                joined.append(" : ".join(group))
                group = None
            continue
        if piece.startswith("(") and not piece.endswith(")*"):
            group = [piece]
            continue
        joined.append(piece)
    if group is not None:
        raise NumberParseError("unterminated periodic group", text)
    terms: list[int] = []
    period: tuple[int, ...] = ()
    for idx, piece in enumerate(joined):
        m = _CF_PERIOD_RE.fullmatch(piece)
        if m:
            if idx != len(joined) - 1:
                raise NumberParseError("periodic group must come last", piece)
            inner = m.group(1)
            try:
                period = tuple(int(s.strip()) for s in inner.split(":"))
            except ValueError:
                raise NumberParseError("malformed periodic group", piece) from None
            continue
        try:
            terms.append(int(piece))
        except ValueError:
            raise NumberParseError("malformed term", piece) from None
    return MinusCF(tuple(terms), period)
