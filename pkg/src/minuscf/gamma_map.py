"""The piecewise Moebius map on the extended real line.

f(x) = x + 1 on (-inf, -1], -1/x on (-1, 1), x - 1 on [1, inf), and
f(inf) = inf.  The three partition cells carry the symbols 2, 0 and 4;
infinity is absorbed into the all-zero symbol stream.  Boundary points
follow the defining inequalities: -1 gets symbol 2, +1 gets symbol 4,
0 gets symbol 0.

Orbits over exact backends are exact.  Orbits over certified enclosures
emit a symbol only once the interval lies strictly inside a single cell,
doubling the working precision as needed up to ``OrbitConfig.max_bits``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, Sequence

from .errors import BoundaryUnresolvableError
from .literals import approx_str
from .numbers import (
    DEFAULT_MAX_BITS,
    INFINITY,
    CertifiedReal,
    Cmp,
    ExtReal,
    Infinity,
    add_int,
    cmp_small,
    neg_recip,
)

__all__ = [
    "OrbitConfig",
    "OrbitStep",
    "Symbol",
    "apply_word",
    "classify",
    "f_gamma",
    "format_word",
    "orbit",
]


class Symbol(IntEnum):
    """Partition symbols, rendered as the digits 0, 2, 4."""

    S0 = 0
    S2 = 2
    S4 = 4

    @property
    def index(self) -> int:
        """Contiguous index 0/1/2 used by the metric."""
        return self.value // 2

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class OrbitConfig:
    """Budgets for orbit iteration and certified symbol decisions."""

    max_steps: int = 10_000
    start_bits: int = 128
    max_bits: int = DEFAULT_MAX_BITS

    def __post_init__(self):
        if self.max_steps < 1 or self.start_bits < 16:
            raise ValueError("max_steps must be >= 1 and start_bits >= 16")
        if self.start_bits > self.max_bits:
            raise ValueError("start_bits must not exceed max_bits")


@dataclass(frozen=True)
class OrbitStep:
    index: int
    value: ExtReal
    symbol: Symbol
    approx: str = field(compare=False)


def classify(x: ExtReal, max_bits: int = DEFAULT_MAX_BITS) -> Symbol:
    """Partition symbol of x: 2 on (-inf,-1], 0 on (-1,1) and at inf, 4 on [1,inf).

    Certified values are refined until the enclosure certifies one cell;
    BoundaryUnresolvableError names the boundary if max_bits is not enough.
    """
    if isinstance(x, Infinity):
        return Symbol.S0
    if isinstance(x, CertifiedReal):
        _, sym = _classify_refining(x, max_bits, None)
        return sym
    if cmp_small(x, -1) in (Cmp.LESS, Cmp.EQUAL):
        return Symbol.S2
    if cmp_small(x, 1) in (Cmp.GREATER, Cmp.EQUAL):
        return Symbol.S4
    return Symbol.S0


def _classify_refining(
    x: CertifiedReal, max_bits: int, step: int | None
) -> tuple[CertifiedReal, Symbol]:
    cur = x
    while True:
        if cur.hi <= -1:
            return cur, Symbol.S2
        if cur.lo >= 1:
            return cur, Symbol.S4
        if cur.lo > -1 and cur.hi < 1:
            return cur, Symbol.S0
        boundary = -1 if cur.lo <= -1 else 1
        if cur.bits >= max_bits:
            raise BoundaryUnresolvableError(boundary, step, cur.bits)
        cur = cur.at_bits(min(2 * cur.bits, max_bits))


def _separate_from_zero(
    x: CertifiedReal, max_bits: int, step: int | None
) -> CertifiedReal | None:
    """Refine until 0 is outside the enclosure; None when x is exactly 0."""
    cur = x
    while cur.lo <= 0 <= cur.hi:
        if cur.lo == cur.hi == 0:
            return None
        if cur.bits >= max_bits:
            raise BoundaryUnresolvableError(0, step, cur.bits)
        cur = cur.at_bits(min(2 * cur.bits, max_bits))
    return cur


def f_gamma(x: ExtReal, max_bits: int = DEFAULT_MAX_BITS) -> ExtReal:
    """One application of the map, on any backend."""
    if isinstance(x, Infinity):
        return INFINITY
    if isinstance(x, CertifiedReal):
        cur, sym = _classify_refining(x, max_bits, None)
        if sym is Symbol.S2:
            return add_int(cur, 1)
        if sym is Symbol.S4:
            return add_int(cur, -1)
        sep = _separate_from_zero(cur, max_bits, None)
        return INFINITY if sep is None else neg_recip(sep)
    sym = classify(x)
    if sym is Symbol.S2:
        return add_int(x, 1)
    if sym is Symbol.S4:
        return add_int(x, -1)
    return neg_recip(x)  # exact branch; -1/0 extends to INFINITY


def orbit(x: ExtReal, n: int, cfg: OrbitConfig = OrbitConfig()) -> list[OrbitStep]:
    """Steps 0..n of the orbit of x, each with its certified symbol.

    Once the orbit reaches infinity every later step is (INFINITY, 0), so
    the result always has n + 1 entries.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > cfg.max_steps:
        raise ValueError(f"n = {n} exceeds max_steps = {cfg.max_steps}")
    cur = x
    if isinstance(cur, CertifiedReal) and cur.bits < cfg.start_bits:
        cur = cur.at_bits(cfg.start_bits)
    steps: list[OrbitStep] = []
    for k in range(n + 1):
        if isinstance(cur, Infinity):
            sym = Symbol.S0
        elif isinstance(cur, CertifiedReal):
            cur, sym = _classify_refining(cur, cfg.max_bits, k)
        else:
            sym = classify(cur)
        steps.append(OrbitStep(k, cur, sym, approx_str(cur)))
        if k == n:
            break
        if isinstance(cur, Infinity):
            continue
        if sym is Symbol.S2:
            cur = add_int(cur, 1)
        elif sym is Symbol.S4:
            cur = add_int(cur, -1)
        elif isinstance(cur, CertifiedReal):
            sep = _separate_from_zero(cur, cfg.max_bits, k)
            cur = INFINITY if sep is None else neg_recip(sep)
        else:
            cur = neg_recip(cur)
    return steps


# ---------------------------------------------------------------------------
# generator words

_TOKEN_RE = re.compile(r"T\^([+-]?\d+)\Z")


def parse_token(token: str) -> tuple[str, int]:
    """Parse a generator token: "S", "T", or "T^k"."""
    if token == "S":
        return ("S", 0)
    if token == "T":
        return ("T", 1)
    m = _TOKEN_RE.fullmatch(token)
    if m:
        return ("T", int(m.group(1)))
    raise ValueError(f"malformed generator token: {token!r}")


def format_word(word: Iterable[tuple[str, int]]) -> list[str]:
    return ["S" if kind == "S" else f"T^{k}" for kind, k in word]


def apply_word(x: ExtReal, word: Sequence[str | tuple[str, int]]) -> ExtReal:
    """Apply a composition word of generators T^k: x -> x+k and S: x -> -1/x.

    The word is written in composition order, so the rightmost token acts
    first, matching how products of transformations are read.
    """
    y = x
    for token in reversed(list(word)):
        kind, k = parse_token(token) if isinstance(token, str) else token
        if kind == "S":
            y = neg_recip(y)
        elif kind == "T":
            y = add_int(y, k)
        else:
            raise ValueError(f"malformed generator token: {token!r}")
    return y
