"""Exact cycle detection, rational termination, and verification harnesses.

Quadratic surds are the eventually periodic points of the map, so iterating
exactly while hashing canonical state keys finds the pre-period and period
in one pass.  Rationals instead fall into infinity after finitely many
steps.  For interval-backed values only word-level consistency checks are
possible, and the scan report says so explicitly.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import MaxStepsExceededError
from .gamma_map import (
    OrbitConfig,
    Symbol,
    apply_word,
    classify,
    f_gamma,
    format_word,
)
from .literals import approx_str, format_literal
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
)
from .shift_space import Itinerary, itinerary, itinerary_to_text, shift

__all__ = [
    "CycleReport",
    "ScanReport",
    "SemiconjugacyResult",
    "TerminationReport",
    "aperiodicity_scan",
    "detect_cycle",
    "rational_termination",
    "verify_semiconjugacy",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CycleReport:
    preperiod: int
    period: int
    cycle_states: tuple[ExtReal, ...]
    cycle_word: tuple[Symbol, ...]
    generator_word: tuple[tuple[str, int], ...]

    def word_text(self) -> str:
        return "".join(str(s) for s in self.cycle_word)

    def to_json(self) -> dict:
        return {
            "kind": "cycle",
            "preperiod": self.preperiod,
            "period": self.period,
            "states": [format_literal(s) for s in self.cycle_states],
            "word": self.word_text(),
            "generator_word": format_word(self.generator_word),
        }


@dataclass(frozen=True)
class TerminationReport:
    steps_to_infinity: int
    itinerary: Itinerary

    def to_json(self) -> dict:
        return {
            "kind": "termination",
            "steps": self.steps_to_infinity,
            "itinerary": itinerary_to_text(self.itinerary),
        }


@dataclass(frozen=True)
class ScanReport:
    horizon: int
    max_period: int
    candidate_period: int | None
    note: str = (
        "word-level consistency check only; finding no short period is not "
        "a proof of aperiodicity"
    )

    def to_json(self) -> dict:
        return {
            "kind": "scan",
            "horizon": self.horizon,
            "max_period": self.max_period,
            "candidate_period": self.candidate_period,
            "note": self.note,
        }


@dataclass(frozen=True)
class SemiconjugacyResult:
    ok: bool
    checked: int
    counterexample: tuple[str, int] | None = None


def _branch_token(sym: Symbol) -> tuple[str, int]:
    if sym is Symbol.S2:
        return ("T", 1)
    if sym is Symbol.S4:
        return ("T", -1)
    return ("S", 0)


def _advance_exact(x: ExtReal, sym: Symbol) -> ExtReal:
    if sym is Symbol.S2:
        return add_int(x, 1)
    if sym is Symbol.S4:
        return add_int(x, -1)
    return neg_recip(x)


def _compress_word(tokens: Sequence[tuple[str, int]]) -> tuple[tuple[str, int], ...]:
    out: list[tuple[str, int]] = []
    for kind, k in tokens:
        if kind == "T" and out and out[-1][0] == "T":
            merged = out[-1][1] + k
            if merged == 0:
                out.pop()
            else:
                out[-1] = ("T", merged)
        else:
            out.append((kind, k))
    return tuple(out)


def detect_cycle(x: QuadraticSurd, cfg: OrbitConfig = OrbitConfig()) -> CycleReport:
    """Pre-period and period of a quadratic surd's exact orbit.

    States are hashed by canonical key, so the first revisit pins both the
    entry point and the minimal period.  The generator word records the
    branches taken around the cycle, in composition order (rightmost acts
    first), with consecutive translations merged.
    """
    if not isinstance(x, QuadraticSurd):
        raise TypeError("detect_cycle needs an exact quadratic surd")
    seen: dict[bytes, int] = {state_key(x): 0}
    states: list[ExtReal] = [x]
    branches: list[tuple[str, int]] = []
    cur: ExtReal = x
    for step in range(1, cfg.max_steps + 1):
        sym = classify(cur)
        branches.append(_branch_token(sym))
        cur = _advance_exact(cur, sym)
        key = state_key(cur)
        if key in seen:
            start = seen[key]
            period = step - start
            cycle_states = tuple(states[start : start + period])
            cycle_word = tuple(classify(s) for s in cycle_states)
            chronological = branches[start : start + period]
            generator_word = _compress_word(list(reversed(chronological)))
            if sum(1 for s in cycle_word if s is Symbol.S0) < 2:
                log.warning(
                    "cycle word %s contains fewer than two zeros",
                    "".join(str(s) for s in cycle_word),
                )
            return CycleReport(start, period, cycle_states, cycle_word, generator_word)
        seen[key] = step
        states.append(cur)
    raise MaxStepsExceededError(
        f"no cycle within {cfg.max_steps} steps; the state budget is too small",
        last_state=cur,
    )


def rational_termination(x: Rational, cfg: OrbitConfig = OrbitConfig()) -> TerminationReport:
    """Steps until a rational orbit reaches infinity, with its itinerary."""
    if not isinstance(x, Rational):
        raise TypeError("rational_termination needs a Rational")
    symbols: list[Symbol] = []
    cur: ExtReal = x
    for step in range(cfg.max_steps + 1):
        if isinstance(cur, Infinity):
            return TerminationReport(step, Itinerary(tuple(symbols), to_infinity=True))
        sym = classify(cur)
        symbols.append(sym)
        cur = _advance_exact(cur, sym)
    raise MaxStepsExceededError(
        f"no termination within {cfg.max_steps} steps", last_state=cur
    )


def aperiodicity_scan(
    x: CertifiedReal,
    horizon: int,
    max_period: int,
    cfg: OrbitConfig = OrbitConfig(),
) -> ScanReport:
    """Check the first `horizon` certified symbols for periods <= max_period.

    This is a consistency check on the symbol word, not a proof: it reports
    the smallest candidate period when one fits the window, and reports none
    otherwise.
    """
    if horizon < 2 * max_period:
        raise ValueError("horizon must be at least twice max_period")
    word = itinerary(x, horizon, cfg).prefix(horizon)
    for p in range(1, max_period + 1):
        if all(word[i] == word[i + p] for i in range(horizon - p)):
            return ScanReport(horizon, max_period, p)
    return ScanReport(horizon, max_period, None)


def verify_semiconjugacy(
    samples: Sequence[ExtReal],
    depth: int,
    cfg: OrbitConfig = OrbitConfig(),
    shift_fn: Callable[[Itinerary], Itinerary] = shift,
) -> SemiconjugacyResult:
    """Check itinerary(f(x)) == shift(itinerary(x)) symbol-wise to depth.

    ``shift_fn`` is injectable so the harness can prove it catches breakage.
    """
    for x in samples:
        lhs = itinerary(f_gamma(x, cfg.max_bits), depth, cfg)
        rhs = shift_fn(itinerary(x, depth + 1, cfg))
        for i in range(depth):
            try:
                a = lhs.symbol_at(i)
                b = rhs.symbol_at(i)
            except ValueError:
                break  # both sides ran out of defined symbols together
            if a != b:
                label = approx_str(x) if isinstance(x, CertifiedReal) else format_literal(x)
                return SemiconjugacyResult(False, len(samples), (label, i))
    return SemiconjugacyResult(True, len(samples))


def report_to_json_text(report) -> str:
    """Stable JSON rendering for any report object with to_json()."""
    return json.dumps(report.to_json(), indent=2)
