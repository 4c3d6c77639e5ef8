"""Number-literal grammar and decimal rendering.

Accepted literals (whitespace-insensitive): integers ``-3``, fractions
``9/7``, exact decimals ``1.25`` / ``2.5e-3``, ``pi``, ``e``, ``inf``,
``sqrt(D)`` with optional integer coefficient and denominator, ``cbrt(D)``,
and the affine form ``(a+b*sqrt(D))/c`` with integer a, b, c, D.

Square roots parse to exact quadratic surds; cube roots of non-cubes and
the transcendental constants parse to certified enclosures.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import NumberParseError
from .numbers import (
    INFINITY,
    CertifiedReal,
    ExtReal,
    Infinity,
    QuadraticSurd,
    Rational,
    cbrt_certified,
    e_certified,
    enclosure_of,
    pi_certified,
    sqrt_certified,
    surd_normalize,
    _certified_apply,
)

__all__ = ["parse_literal", "format_literal", "approx_str", "certified_decimal"]

_INT_RE = re.compile(r"[+-]?\d+\Z")
_FRAC_RE = re.compile(r"([+-]?\d+)/(\d+)\Z")
_DECIMAL_RE = re.compile(r"[+-]?(\d+\.\d*|\.\d+|\d+[eE][+-]?\d+|\d+\.\d*[eE][+-]?\d+)\Z")
_SQRT_RE = re.compile(r"(?:([+-]?\d+)\*|([+-]))?sqrt\(([+-]?\d+)\)(?:/([+-]?\d+))?\Z")
_CBRT_RE = re.compile(r"([+-]?)cbrt\(([+-]?\d+)\)\Z")
_AFFINE_RE = re.compile(
    r"\(([+-]?\d+)([+-])(?:(\d+)\*)?sqrt\(([+-]?\d+)\)\)(?:/([+-]?\d+))?\Z"
)


def parse_literal(text: str, bits: int = 128) -> ExtReal:
    """Parse a number literal; ``bits`` seeds certified constants."""
    compact = "".join(text.split())
    if not compact:
        raise NumberParseError("empty number literal", text)
    if _INT_RE.fullmatch(compact):
        return Rational(int(compact))
    m = _FRAC_RE.fullmatch(compact)
    if m:
        num, den = int(m.group(1)), int(m.group(2))
        if den == 0:
            raise NumberParseError("zero denominator", compact)
        return Rational(num, den)
    if _DECIMAL_RE.fullmatch(compact):
        return Rational.from_fraction(Fraction(compact))
    low = compact.lower()
    if low in ("inf", "infinity", "oo"):
        return INFINITY
    if low in ("pi", "-pi", "+pi"):
        x = pi_certified(bits)
        return _certified_apply((-1, 0, 0, 1), x) if low[0] == "-" else x
    if low in ("e", "-e", "+e"):
        x = e_certified(bits)
        return _certified_apply((-1, 0, 0, 1), x) if low[0] == "-" else x
    m = _SQRT_RE.fullmatch(compact)
    if m:
        coeff_digits, bare_sign, rad, den = m.groups()
        if int(rad) < 0:
            raise NumberParseError("negative radicand under sqrt", rad)
        coeff = int(coeff_digits) if coeff_digits else (-1 if bare_sign == "-" else 1)
        den_i = int(den) if den else 1
        if den_i == 0:
            raise NumberParseError("zero denominator", compact)
        return surd_normalize(0, coeff, den_i, int(rad))
    m = _CBRT_RE.fullmatch(compact)
    if m:
        sign = -1 if m.group(1) == "-" else 1
        rad = int(m.group(2))
        root = round(abs(rad) ** (1 / 3)) if rad != 0 else 0
        if root**3 == abs(rad):
            signed = root if rad >= 0 else -root
            return Rational(sign * signed)
        x = cbrt_certified(rad, bits)
        return _certified_apply((-1, 0, 0, 1), x) if sign < 0 else x
    m = _AFFINE_RE.fullmatch(compact)
    if m:
        a, op, b, rad, den = m.groups()
        if int(rad) < 0:
            raise NumberParseError("negative radicand under sqrt", rad)
        q = int(b) if b else 1
        if op == "-":
            q = -q
        den_i = int(den) if den else 1
        if den_i == 0:
            raise NumberParseError("zero denominator", compact)
        return surd_normalize(int(a), q, den_i, int(rad))
    raise NumberParseError("cannot parse number literal", compact)


def format_literal(x: ExtReal) -> str:
    """Canonical literal string that parse_literal reads back exactly."""
    match x:
        case Rational():
            return str(x.num) if x.den == 1 else f"{x.num}/{x.den}"
        case QuadraticSurd():
            return _format_surd(x)
        case Infinity():
            return "inf"
        case CertifiedReal():
            if x.mat == (1, 0, 0, 1):
                return x.label
            raise NotImplementedError(
                "derived certified values have no exact literal form"
            )
    raise TypeError(f"not an ExtReal: {x!r}")


def _format_surd(x: QuadraticSurd) -> str:
    if x.p == 0:
        if x.q == 1:
            core = f"sqrt({x.d})"
        elif x.q == -1:
            core = f"-sqrt({x.d})"
        else:
            core = f"{x.q}*sqrt({x.d})"
        return core if x.r == 1 else f"{core}/{x.r}"
    sign = "+" if x.q > 0 else "-"
    body = f"({x.p}{sign}{abs(x.q)}*sqrt({x.d}))"
    return body if x.r == 1 else f"{body}/{x.r}"


# ---------------------------------------------------------------------------
# decimal rendering


def _round_sig(value: Fraction, sig: int) -> tuple[int, int]:
    """Round |value| > 0 to ``sig`` significant digits, half-to-even.

    Returns (digits, exponent) with 10**exponent the place value of the
    leading digit; ``digits`` has exactly ``sig`` digits.
    """
    a = abs(value)
    e = 0
    if a >= 1:
        e = len(str(int(a))) - 1
    else:
        scaled = a
        while scaled < 1:
            scaled *= 10
            e -= 1
    n = round(a * Fraction(10) ** (sig - 1 - e))
    if n >= 10**sig:
        n //= 10
        e += 1
    return n, e


def _place_digits(n: int, e: int, negative: bool) -> str:
    digits = str(n)
    sig = len(digits)
    if e >= sig:
        body = digits + "0" * (e - sig + 1)
    elif e >= 0:
        frac = digits[e + 1 :].rstrip("0")
        body = digits[: e + 1] + (f".{frac}" if frac else "")
    else:
        body = "0." + "0" * (-e - 1) + digits.rstrip("0")
    return ("-" if negative else "") + body


def decimal_str(value: Fraction, sig: int = 15) -> str:
    """Deterministic round-half-even decimal with ``sig`` significant digits."""
    value = Fraction(value)
    if value == 0:
        return "0"
    n, e = _round_sig(value, sig)
    return _place_digits(n, e, value < 0)


def certified_decimal(lo: Fraction, hi: Fraction, max_digits: int = 15) -> str:
    """Round-to-nearest rendering printing only digits the enclosure certifies.

    The printed value is within one unit in its last digit of every point of
    [lo, hi]; a leading ``~`` flags the degenerate case where not even one
    digit is certified.
    """
    if lo == hi:
        return decimal_str(lo, max_digits)
    mid = (lo + hi) / 2
    width = hi - lo
    if mid == 0:
        return "~0"
    _, e = _round_sig(mid, 1)
    sig = max_digits
    while sig > 1 and Fraction(10) ** (e + 1 - sig) < 2 * width:
        sig -= 1
    rendered = decimal_str(mid, sig)
    if Fraction(10) ** (e + 1 - sig) < 2 * width:
        return "~" + rendered
    return rendered


def approx_str(x: ExtReal, digits: int = 15, bits: int = 192) -> str:
    """Display-only decimal rendering of any ExtReal."""
    if isinstance(x, Infinity):
        return "inf"
    if isinstance(x, Rational):
        return decimal_str(x.as_fraction(), digits)
    enc = enclosure_of(x, bits) if not isinstance(x, CertifiedReal) else (x.lo, x.hi)
    return certified_decimal(enc[0], enc[1], digits)
