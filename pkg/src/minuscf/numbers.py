"""Exact and certified number backends.

The map engine needs very little arithmetic: add an integer, take -1/x,
compare against -1, 0 and 1, and hash exact states.  Three value kinds
cover every input the package accepts:

* ``Rational``      -- reduced p/q with positive denominator.
* ``QuadraticSurd`` -- (p + q*sqrt(d))/r with d squarefree, q != 0, r > 0
  and gcd(p, q, r) = 1.  The exact backend that makes cycle detection a
  hash-table lookup.
* ``CertifiedReal`` -- an interval [lo, hi] with exact rational endpoints
  plus a source callback that reproduces the enclosure of the underlying
  point at any requested precision.  Backs pi, e, cube roots and other
  non-quadratic reals.  A Moebius matrix accumulates the transformations
  applied so far, so refining late orbit values re-derives them from a
  sharper base enclosure instead of replaying interval steps.

``INFINITY`` extends the real line projectively; ``ExtReal`` is the union
of the four kinds.  All values are immutable after construction and the
source callbacks are pure, so everything here is safe to share between
threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Union

import gmpy2

from .errors import (
    NotExactError,
    PrecisionUnavailableError,
    UnsupportedRadicandError,
)

__all__ = [
    "Cmp",
    "CertifiedReal",
    "DEFAULT_MAX_BITS",
    "ExtReal",
    "INFINITY",
    "Infinity",
    "QuadraticSurd",
    "Rational",
    "add_int",
    "cbrt_certified",
    "cmp_small",
    "constant_certified",
    "e_certified",
    "enclosure_of",
    "is_exact",
    "neg_recip",
    "pi_certified",
    "refine_to",
    "sqrt_certified",
    "state_key",
    "surd_normalize",
]

#: Default ceiling for automatic precision escalation.
DEFAULT_MAX_BITS = 1 << 20

#: Absolute cap for any refinement loop; beyond this we assume the value is
#: not separable (e.g. a certified constant that is secretly rational).
_HARD_BIT_CAP = 1 << 26

#: Trial-division bound used when certifying radicands squarefree.
_TRIAL_LIMIT = 10**6

#: A cofactor with no prime factor <= _TRIAL_LIMIT that is not a perfect
#: square is certainly squarefree below this bound (a square factor would
#: need a prime > 1e6 twice, plus a cofactor > 1e6).
_SQUAREFREE_CERT_LIMIT = 10**18


# ---------------------------------------------------------------------------
# value kinds


@dataclass(frozen=True)
class Rational:
    """Reduced fraction num/den with den > 0."""

    num: int
    den: int = 1

    def __post_init__(self):
        if self.den == 0:
            raise ZeroDivisionError("rational with zero denominator")
        g = math.gcd(self.num, self.den)
        num, den = self.num // g, self.den // g
        if den < 0:
            num, den = -num, -den
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def from_fraction(cls, value: Fraction) -> "Rational":
        return cls(value.numerator, value.denominator)

    def as_fraction(self) -> Fraction:
        return Fraction(self.num, self.den)

    def __repr__(self):
        return f"Rational({self.num}, {self.den})"


@dataclass(frozen=True)
class QuadraticSurd:
    """Exact value (p + q*sqrt(d))/r.

    The constructor reduces gcd(p, q, r) and forces r > 0 but trusts that d
    is already squarefree and >= 2.  Construct from raw integers through
    :func:`surd_normalize`, which extracts square factors of d and falls
    back to :class:`Rational` when the value is not irrational.
    """

    p: int
    q: int
    r: int
    d: int

    def __post_init__(self):
        if self.r == 0:
            raise ZeroDivisionError("surd with zero denominator")
        if self.q == 0:
            raise ValueError("q = 0 is a rational value; use Rational")
        if self.d < 2:
            raise ValueError("radicand must be >= 2")
        p, q, r = self.p, self.q, self.r
        if r < 0:
            p, q, r = -p, -q, -r
        g = math.gcd(math.gcd(abs(p), abs(q)), r)
        object.__setattr__(self, "p", p // g)
        object.__setattr__(self, "q", q // g)
        object.__setattr__(self, "r", r // g)

    def __repr__(self):
        return f"QuadraticSurd(({self.p}{self.q:+}*sqrt({self.d}))/{self.r})"


@dataclass(frozen=True)
class Infinity:
    """The single point at infinity of the projective line."""

    def __repr__(self):
        return "INFINITY"


INFINITY = Infinity()

Enclosure = tuple[Fraction, Fraction]
SourceFn = Callable[[int], Enclosure]
_IDENTITY = (1, 0, 0, 1)


@dataclass(frozen=True, eq=False, repr=False)
class CertifiedReal:
    """Interval enclosure of a real together with a way to sharpen it.

    ``source(bits)`` must return a directed enclosure of the *base* point
    computed at the given working precision, nested as bits grows.  ``mat``
    is the Moebius matrix mapping the base point to this value; the stored
    [lo, hi] always contains ``mat`` applied to the base point.
    """

    lo: Fraction
    hi: Fraction
    bits: int
    source: SourceFn
    mat: tuple[int, int, int, int] = _IDENTITY
    label: str = "certified"

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("enclosure with lo > hi")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def at_bits(self, bits: int, cap: int = _HARD_BIT_CAP) -> "CertifiedReal":
        """Reproduce the enclosure from the base point at >= ``bits`` bits.

        The result is intersected with the current enclosure, so repeated
        refinement always nests.
        """
        lo, hi = _enclosure_from_source(self.source, self.mat, bits, cap, self.label)
        lo, hi = max(lo, self.lo), min(hi, self.hi)
        if lo > hi:
            raise PrecisionUnavailableError(
                f"{self.label}: refinement produced a disjoint enclosure"
            )
        return CertifiedReal(lo, hi, max(bits, self.bits), self.source, self.mat, self.label)

    def __repr__(self):
        return f"CertifiedReal({self.label}, bits={self.bits})"


ExtReal = Union[Rational, QuadraticSurd, CertifiedReal, Infinity]


def is_exact(x: ExtReal) -> bool:
    """True when x supports state_key (everything but CertifiedReal)."""
    return not isinstance(x, CertifiedReal)


# ---------------------------------------------------------------------------
# squarefree normalization


def _squarefree_split(d: int) -> tuple[int, int]:
    """Split d = s*s * d0 with d0 squarefree, or reject oversized inputs."""
    s, d0, m = 1, 1, d
    f = 2
    while f <= _TRIAL_LIMIT and f * f <= m:
        if m % f == 0:
            e = 0
            while m % f == 0:
                m //= f
                e += 1
            s *= f ** (e // 2)
            if e % 2:
                d0 *= f
        f += 1 if f == 2 else 2
    if m > 1:
        root = math.isqrt(m)
        if root * root == m:
            s *= root
        elif m > _SQUAREFREE_CERT_LIMIT:
            raise UnsupportedRadicandError(
                f"radicand cofactor {m} too large to certify squarefree"
            )
        else:
            d0 *= m
    return s, d0


def surd_normalize(p: int, q: int, r: int, d: int) -> Union[QuadraticSurd, Rational]:
    """Canonicalize (p + q*sqrt(d))/r, collapsing to Rational when possible."""
    if r == 0:
        raise ZeroDivisionError("surd with zero denominator")
    if d < 0:
        raise UnsupportedRadicandError(f"negative radicand {d}")
    s, d0 = _squarefree_split(d)
    q = q * s
    if q == 0 or d0 == 1:
        return Rational(p + q, r) if d0 == 1 and q != 0 else Rational(p, r)
    return QuadraticSurd(p, q, r, d0)


# ---------------------------------------------------------------------------
# exact sign analysis


def _sign(n: int) -> int:
    return (n > 0) - (n < 0)


def _sign_a_plus_b_sqrt_d(a: int, b: int, d: int) -> int:
    """Exact sign of a + b*sqrt(d) using integer arithmetic only."""
    if b == 0:
        return _sign(a)
    if b > 0:
        if a >= 0:
            return 1
        return _sign(b * b * d - a * a)
    return -_sign_a_plus_b_sqrt_d(-a, -b, d)


def surd_floor(x: QuadraticSurd) -> int:
    """Exact floor of a quadratic surd."""
    t = math.isqrt(x.q * x.q * x.d)
    if x.q > 0:
        approx = x.p + t  # q*sqrt(d) lies in [t, t+1)
    else:
        approx = x.p - t - 1  # q*sqrt(d) lies in (-(t+1), -t]
    n = approx // x.r
    while _sign_a_plus_b_sqrt_d(x.p - (n + 1) * x.r, x.q, x.d) >= 0:
        n += 1
    while _sign_a_plus_b_sqrt_d(x.p - n * x.r, x.q, x.d) < 0:
        n -= 1
    return n


# ---------------------------------------------------------------------------
# interval plumbing


def _mat_mul(m1, m2):
    a1, b1, c1, d1 = m1
    a2, b2, c2, d2 = m2
    return (
        a1 * a2 + b1 * c2,
        a1 * b2 + b1 * d2,
        c1 * a2 + d1 * c2,
        c1 * b2 + d1 * d2,
    )


def _mobius_point(mat, t: Fraction) -> Fraction:
    a, b, c, d = mat
    return (a * t + b) / (c * t + d)


def _mobius_enclosure(mat, lo: Fraction, hi: Fraction) -> Enclosure | None:
    """Image of [lo, hi] under a Moebius map, or None if the pole is inside."""
    a, b, c, d = mat
    if c != 0:
        pole = Fraction(-d, c)
        if lo <= pole <= hi:
            return None
    u, v = _mobius_point(mat, lo), _mobius_point(mat, hi)
    return (u, v) if u <= v else (v, u)


def _enclosure_from_source(source, mat, bits, cap, label) -> Enclosure:
    b = max(bits, 16)
    while True:
        img = _mobius_enclosure(mat, *source(b))
        if img is not None:
            return img
        if b >= cap:
            raise PrecisionUnavailableError(
                f"{label}: pole not separated from base enclosure at {b} bits"
            )
        b = min(2 * b, cap)


def _to_fraction(x) -> Fraction:
    n, d = x.as_integer_ratio()
    return Fraction(int(n), int(d))


def _directed_enclosure(fn, bits: int) -> Enclosure:
    with gmpy2.context(precision=bits, round=gmpy2.RoundDown):
        lo = fn()
    with gmpy2.context(precision=bits, round=gmpy2.RoundUp):
        hi = fn()
    return _to_fraction(lo), _to_fraction(hi)


def _certified_constant(fn, label: str, bits: int) -> CertifiedReal:
    @lru_cache(maxsize=32)
    def source(b: int) -> Enclosure:
        return _directed_enclosure(fn, b)

    lo, hi = source(max(bits, 16))
    return CertifiedReal(lo, hi, max(bits, 16), source, _IDENTITY, label)


def pi_certified(bits: int = 128) -> CertifiedReal:
    return _certified_constant(gmpy2.const_pi, "pi", bits)


def e_certified(bits: int = 128) -> CertifiedReal:
    return _certified_constant(lambda: gmpy2.exp(1), "e", bits)


def sqrt_certified(n: int, bits: int = 128) -> CertifiedReal:
    if n < 0:
        raise UnsupportedRadicandError(f"negative radicand {n}")
    return _certified_constant(lambda: gmpy2.sqrt(n), f"sqrt({n})", bits)


def cbrt_certified(n: int, bits: int = 128) -> CertifiedReal:
    return _certified_constant(lambda: gmpy2.cbrt(n), f"cbrt({n})", bits)


def constant_certified(value: Fraction, label: str | None = None, bits: int = 128) -> CertifiedReal:
    """Point enclosure of an exact rational, mostly useful in tests."""
    value = Fraction(value)

    def source(_b: int) -> Enclosure:
        return (value, value)

    return CertifiedReal(value, value, max(bits, 16), source, _IDENTITY, label or str(value))


def refine_to(x: CertifiedReal, bits: int) -> CertifiedReal:
    """Sharpen an enclosure to width <= 2**(1-bits) * max(1, |x|).

    Raises PrecisionUnavailableError when the source cannot deliver.
    """
    if bits < 16:
        raise ValueError("bits must be >= 16")
    work = max(bits, x.bits)
    cur = x.at_bits(work)
    while True:
        scale = max(Fraction(1), abs(cur.lo), abs(cur.hi))
        if cur.width <= Fraction(2) ** (1 - bits) * scale:
            return cur
        if work >= _HARD_BIT_CAP:
            raise PrecisionUnavailableError(
                f"{x.label}: cannot reach width 2**(1-{bits}) within {_HARD_BIT_CAP} bits"
            )
        work = min(2 * work, _HARD_BIT_CAP)
        cur = cur.at_bits(work)


# ---------------------------------------------------------------------------
# the four operations the map needs


def add_int(x: ExtReal, k: int) -> ExtReal:
    """Exact x + k, extended by INFINITY + k = INFINITY."""
    match x:
        case Rational():
            return Rational(x.num + k * x.den, x.den)
        case QuadraticSurd():
            return QuadraticSurd(x.p + k * x.r, x.q, x.r, x.d)
        case CertifiedReal():
            return _certified_apply((1, k, 0, 1), x)
        case Infinity():
            return INFINITY
    raise TypeError(f"not an ExtReal: {x!r}")


def neg_recip(x: ExtReal) -> ExtReal:
    """-1/x with the projective extension -1/0 = INFINITY, -1/INFINITY = 0."""
    match x:
        case Rational():
            if x.num == 0:
                return INFINITY
            return Rational(-x.den, x.num)
        case QuadraticSurd():
            # -r(p - q*sqrt(d)) / (p^2 - q^2 d); never zero for irrationals
            return QuadraticSurd(-x.r * x.p, x.r * x.q, x.p * x.p - x.q * x.q * x.d, x.d)
        case CertifiedReal():
            return _certified_apply((0, -1, 1, 0), x)
        case Infinity():
            return Rational(0)
    raise TypeError(f"not an ExtReal: {x!r}")


def _certified_apply(gen, x: CertifiedReal) -> CertifiedReal:
    mat = _mat_mul(gen, x.mat)
    img = _mobius_enclosure(gen, x.lo, x.hi)
    if img is None:
        img = _enclosure_from_source(x.source, mat, x.bits, _HARD_BIT_CAP, x.label)
    return CertifiedReal(img[0], img[1], x.bits, x.source, mat, x.label)


class Cmp(Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"
    UNCERTAIN = "uncertain"


def cmp_small(x: ExtReal, n: int) -> Cmp:
    """Trichotomy of x against n in {-1, 0, 1}.

    Exact kinds always decide; CertifiedReal answers from its current
    enclosure and reports UNCERTAIN when the interval straddles n.
    """
    if n not in (-1, 0, 1):
        raise ValueError("cmp_small only compares against -1, 0, 1")
    match x:
        case Rational():
            s = _sign(x.num - n * x.den)
        case QuadraticSurd():
            s = _sign_a_plus_b_sqrt_d(x.p - n * x.r, x.q, x.d)
        case CertifiedReal():
            if x.lo > n:
                return Cmp.GREATER
            if x.hi < n:
                return Cmp.LESS
            if x.lo == x.hi == n:
                return Cmp.EQUAL
            return Cmp.UNCERTAIN
        case Infinity():
            return Cmp.GREATER
        case _:
            raise TypeError(f"not an ExtReal: {x!r}")
    return {-1: Cmp.LESS, 0: Cmp.EQUAL, 1: Cmp.GREATER}[s]


def state_key(x: ExtReal) -> bytes:
    """Canonical byte string; equal exact values get equal keys."""
    match x:
        case Rational():
            return f"Q {x.num}/{x.den}".encode("ascii")
        case QuadraticSurd():
            return f"S {x.p} {x.q} {x.r} {x.d}".encode("ascii")
        case Infinity():
            return b"oo"
        case CertifiedReal():
            raise NotExactError("state_key is undefined for interval-backed values")
    raise TypeError(f"not an ExtReal: {x!r}")


# ---------------------------------------------------------------------------
# numeric views (display, plotting, oracle cross-checks)


def enclosure_of(x: ExtReal, bits: int = 128) -> Enclosure | None:
    """A correct enclosure of x at roughly the requested precision.

    Returns None for INFINITY.  For exact kinds this is an independent
    numeric evaluation (directed square roots), deliberately separate from
    the integer sign analysis used by cmp_small.
    """
    match x:
        case Rational():
            v = x.as_fraction()
            return (v, v)
        case QuadraticSurd():
            s_lo, s_hi = _directed_enclosure(lambda: gmpy2.sqrt(x.d), bits)
            if x.q >= 0:
                lo = (x.p + x.q * s_lo) / x.r
                hi = (x.p + x.q * s_hi) / x.r
            else:
                lo = (x.p + x.q * s_hi) / x.r
                hi = (x.p + x.q * s_lo) / x.r
            return (Fraction(lo), Fraction(hi))
        case CertifiedReal():
            ref = x.at_bits(max(bits, x.bits))
            return (ref.lo, ref.hi)
        case Infinity():
            return None
    raise TypeError(f"not an ExtReal: {x!r}")
