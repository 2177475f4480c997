"""Implication registry between the conditions, and growth checks on families.

The registry holds the 8x8 table of implications between P1..P8 (the primed
conditions are equivalent to their unprimed partners).  Its non-implications
are re-derived from a small set of base facts plus the implication chains, so
every cell carries a provenance string.

Three non-implications come with constructions in :mod:`ainfty.families`;
:func:`check_table` verifies them numerically: the source condition stays
under its known constant along the family while the target's constant
grows without bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .conditions import CONDITIONS, ConditionParams, evaluate, make_params, normalize_condition
from .errors import AinftyError, ProfileError
from .families import SINGLE, FamilySpec, make_family

EQUIVALENT = "equivalent"
IMPLIES = "implies"
FAILS = "fails"
SELF = "self"

BASE = ("P1", "P2", "P3", "P4", "P5", "P6", "P7", "P8")

# rows imply columns; "+" holds, "x" fails, "[x]" fails and was open before
# the three families below
_TABLE = """
      P1   P2   P3   P4   P5   P6   P7   P8
P1    =    +    x    +    +    x    [x]  x
P2    x    =    x    +    +    x    [x]  x
P3    x    x    =    +    x    +    [x]  x
P4    x    x    x    =    x    x    [x]  x
P5    x    [x]  x    +    =    x    [x]  x
P6    x    x    x    +    x    =    [x]  x
P7    x    x    x    x    x    x    =    x
P8    x    x    +    +    x    +    [x]  =
"""


def _parse_table(text: str) -> dict[tuple[str, str], str]:
    lines = [ln.split() for ln in text.strip().splitlines()]
    cols = lines[0]
    return {(row[0], col): mark for row in lines[1:] for col, mark in zip(cols, row[1:])}


TABLE = _parse_table(_TABLE)

CHAINS = (("P1", "P2", "P5", "P4"), ("P8", "P3", "P6", "P4"))

KNOWN_FAILURES = (
    ("P8", "P5", "DMO16 counterexample"),
    ("P2", "P1", "DMO16 counterexample"),
    ("P1", "P6", "DMO16 counterexample"),
    ("P6", "P3", "DMO16 counterexample"),
    ("P3", "P8", "DMO16 counterexample"),
    ("P7", "P4", "DMO16 counterexample"),
    ("P5", "P2", "lemma1 family"),
    ("P1", "P7", "lemma2 family"),
    ("P8", "P7", "lemma3 family"),
)

CONDITIONAL = {
    ("P1", "P7"): "holds when the maximal operator is bounded on L^p(v) for every p > 1 and v in A_p (DMO16 Thm 4.2)",
    ("P3", "P7"): "holds when the maximal operator is bounded on every L^p, p > 1 (DMO16 Thm 4.2)",
    ("P6", "P7"): "holds when the maximal operator is of weak type (1,1) (DMO16 Thm 4.2)",
    ("P2", "P7"): "holds when the maximal operator is bounded on some L^p and M(w chi_B) is a sup of "
                  "averages over basis elements inside B (DMO16 Thm 4.2)",
}


def _implication_closure():
    up = {c: {c} for c in BASE}  # up[a] = everything a implies
    changed = True
    edges = [(a, b) for chain in CHAINS for a, b in zip(chain, chain[1:])]
    while changed:
        changed = False
        for a, b in edges:
            for c in BASE:
                if a in up[c] and not up[b] <= up[c]:
                    up[c] |= up[b]
                    changed = True
    return up


IMPLIED_BY = _implication_closure()


def _chain_text(a: str, b: str) -> str:
    for chain in CHAINS:
        if a in chain and b in chain and chain.index(a) < chain.index(b):
            return " => ".join(chain[chain.index(a): chain.index(b) + 1])
    raise KeyError((a, b))


def derive_table() -> dict[tuple[str, str], tuple[str, str]]:
    """Status and provenance of every cell, derived from chains and base facts.

    A failure ``A -/-> B`` propagates to ``C -/-> D`` whenever ``A => C`` and
    ``D => B``.  The first base fact (in :data:`KNOWN_FAILURES` order) that
    reaches a cell names its provenance.
    """
    cells: dict[tuple[str, str], tuple[str, str]] = {}
    for a in BASE:
        for b in BASE:
            if a == b:
                cells[a, b] = (SELF, "diagonal")
            elif b in IMPLIED_BY[a]:
                cells[a, b] = (IMPLIES, f"DMO16 Thm 4.1: {_chain_text(a, b)}")
    for a, b, source in KNOWN_FAILURES:
        for c in BASE:
            if c not in IMPLIED_BY[a]:
                continue
            for d in BASE:
                if b not in IMPLIED_BY[d] or (c, d) in cells:
                    continue
                text = f"{a} -/-> {b} ({source})"
                if c != a:
                    text += f" with {a} => {c}"
                if d != b:
                    text += f" with {d} => {b}"
                if (c, d) == (a, b):
                    text = f"{source}: {a} -/-> {b}"
                cells[c, d] = (FAILS, text)
    return cells


_DERIVED = derive_table()


@dataclass(frozen=True)
class WitnessCheck:
    """A family on which ``source`` stays below ``bound`` while ``target`` diverges."""

    family: str
    source: str
    source_params: ConditionParams
    bound: Fraction
    target: str
    target_params: ConditionParams
    levels: tuple


WITNESSES = {
    ("P5", "P2"): WitnessCheck("lemma1", "P5", make_params("P5"), Fraction(1), "P2", make_params("P2"),
                               tuple(2**k for k in range(37))),
    ("P1", "P7"): WitnessCheck("lemma2", "P1'", make_params("P1'", delta=Fraction(1, 2)), Fraction(4),
                               "P7", make_params("P7"), tuple(range(1, 9))),
    ("P8", "P7"): WitnessCheck("lemma3", "P8", make_params("P8", beta=1), Fraction(4),
                               "P7", make_params("P7"), tuple(range(1, 11))),
}


@dataclass(frozen=True)
class RelationEntry:
    source: str
    target: str
    status: str
    provenance: str
    new: bool = False
    witness: WitnessCheck | None = None
    note: str | None = None


def _base(c: str) -> str:
    return normalize_condition(c).rstrip("'")


def lookup(source: str, target: str) -> RelationEntry:
    """Registry cell for ``source => target``; primed conditions map to their partners."""
    s, t = normalize_condition(source), normalize_condition(target)
    bs, bt = _base(s), _base(t)
    if s == t:
        return RelationEntry(s, t, SELF, "diagonal")
    if bs == bt:
        return RelationEntry(s, t, EQUIVALENT, f"DMO16 Thm 3.1: {bs} <=> {bs}'")
    status, provenance = _DERIVED[bs, bt]
    primed = [f"{x} <=> {bx}" for x, bx in ((s, bs), (t, bt)) if x != bx]
    if primed:
        provenance += f"; {', '.join(primed)} (DMO16 Thm 3.1)"
    witness = WITNESSES.get((bs, bt)) if (s, t) == (bs, bt) else None
    return RelationEntry(s, t, status, provenance, new=TABLE[bs, bt] == "[x]", witness=witness,
                         note=CONDITIONAL.get((bs, bt)))


def registry() -> list[RelationEntry]:
    return [lookup(a, b) for a in CONDITIONS for b in CONDITIONS]


# -- growth classification -----------------------------------------------------------------


@dataclass(frozen=True)
class GrowthVerdict:
    kind: str  # bounded | divergent | inconclusive
    rate_kind: str | None = None  # polynomial | exponential
    rate: float | None = None  # exponent against n, or base of the exponential
    residual: float | None = None

    def __str__(self):
        if self.rate_kind == "polynomial":
            return f"{self.kind} (polynomial, exponent {self.rate:.4f})"
        if self.rate_kind == "exponential":
            return f"{self.kind} (exponential, base {self.rate:.4f})"
        return self.kind


BOUNDED_RATIO = 1.1
SLOPE_MIN = 0.05


def _fit(x, y):
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return float(slope), float(np.sqrt(np.mean(resid**2)))


def classify_growth(sequence: Sequence[tuple[int, object]]) -> GrowthVerdict:
    """Bounded / divergent / inconclusive verdict for ``[(n, C_n), ...]``.

    Any infinite term means divergent.  Otherwise: bounded if the last half
    of the sequence varies by less than a factor 1.1; divergent if the last
    half is nondecreasing and log C_n has slope above 0.05 against n
    (exponential, when that fit beats the one against log n) or against
    log n (polynomial); inconclusive otherwise.  The fits use the last half
    of the points (at least four), where lower-order terms matter least.
    """
    if len(sequence) < 4:
        raise ValueError("classify_growth needs at least 4 points")
    ns = [n for n, _ in sequence]
    values = [v for _, v in sequence]
    if any(v == math.inf for v in values):
        return GrowthVerdict("divergent")
    tail = [float(v) for v in values[len(values) // 2:]]
    if max(tail) == 0 or (min(tail) > 0 and max(tail) < BOUNDED_RATIO * min(tail)):
        return GrowthVerdict("bounded")
    if min(float(v) for v in values) <= 0:
        return GrowthVerdict("inconclusive")
    nondecreasing = all(b >= a * (1 - 1e-12) for a, b in zip(tail, tail[1:])) and tail[-1] > tail[0]
    k = min(len(values), max(4, (len(values) + 1) // 2))
    n_arr = np.array(ns[-k:], dtype=float)
    y = np.log(np.array([float(v) for v in values[-k:]]))
    lin_slope, lin_res = _fit(n_arr, y)
    log_slope, log_res = _fit(np.log(n_arr), y)
    if nondecreasing and lin_slope > SLOPE_MIN and lin_res < log_res:
        return GrowthVerdict("divergent", "exponential", math.exp(lin_slope), lin_res)
    if nondecreasing and log_slope > SLOPE_MIN:
        return GrowthVerdict("divergent", "polynomial", log_slope, log_res)
    return GrowthVerdict("inconclusive")


# -- family profiles ----------------------------------------------------------------------


@dataclass(frozen=True)
class FamilyProfile:
    family: str
    condition: str
    params: ConditionParams
    rows: tuple  # (n, value, backend)
    verdict: GrowthVerdict
    mode: str = SINGLE

    @property
    def values(self) -> list:
        return [v for _, v, _ in self.rows]


def family_profiles(family: str, conditions: Iterable[tuple[str, ConditionParams | None]], n_range: Iterable[int],
                    mode: str = SINGLE, strategy: str | None = None) -> list[FamilyProfile]:
    """Evaluate several conditions level by level, building each instance once."""
    conditions = [(normalize_condition(c), p) for c, p in conditions]
    n_range = list(n_range)
    if not n_range:
        raise ValueError("empty level range")
    rows = {c: [] for c, _ in conditions}
    params_used = {}
    for n in n_range:
        instance = make_family(FamilySpec(family, n, mode))
        for cond, params in conditions:
            try:
                report = evaluate(instance, cond, params, strategy if cond in ("P1'", "P3'", "P4") else None)
            except AinftyError as e:
                raise ProfileError(n, e) from e
            params_used[cond] = report.params
            rows[cond].append((n, report.overall, report.backend))
        del instance
    out = []
    for cond, _ in conditions:
        seq = [(n, v) for n, v, _ in rows[cond]]
        verdict = classify_growth(seq) if len(seq) >= 4 else GrowthVerdict("inconclusive")
        out.append(FamilyProfile(family, cond, params_used[cond], tuple(rows[cond]), verdict, mode))
    return out


def family_profile(condition: str, params: ConditionParams | None, family: str, n_range: Iterable[int],
                   mode: str = SINGLE, strategy: str | None = None) -> FamilyProfile:
    return family_profiles(family, [(condition, params)], n_range, mode, strategy)[0]


# -- the table check -------------------------------------------------------------------


DIVERGENCE_THRESHOLD = 100


@dataclass(frozen=True)
class WitnessResult:
    cell: tuple
    check: WitnessCheck
    source_profile: FamilyProfile
    target_profile: FamilyProfile
    failures: tuple

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass(frozen=True)
class TableReport:
    entries: tuple
    witnesses: tuple
    threshold: float
    failures: tuple = field(default=())

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_witness(cell, check: WitnessCheck, threshold=DIVERGENCE_THRESHOLD, levels=None) -> WitnessResult:
    levels = tuple(levels) if levels is not None else check.levels
    src, tgt = family_profiles(check.family, [(check.source, check.source_params),
                                              (check.target, check.target_params)], levels)
    failures = []
    for n, v, _ in src.rows:
        if not v <= check.bound:
            failures.append((cell, n, f"{check.source} = {v} exceeds {check.bound}"))
    if src.verdict.kind != "bounded":
        failures.append((cell, levels[-1], f"{check.source} profile is {src.verdict}, expected bounded"))
    if tgt.verdict.kind != "divergent":
        failures.append((cell, levels[-1], f"{check.target} profile is {tgt.verdict}, expected divergent"))
    top = tgt.rows[-1][1]
    if not top > threshold:
        failures.append((cell, tgt.rows[-1][0], f"{check.target} = {float(top):.6g} does not exceed {threshold}"))
    return WitnessResult(cell, check, src, tgt, tuple(failures))


def check_table(threshold=DIVERGENCE_THRESHOLD, levels: dict | None = None) -> TableReport:
    """Verify the three constructed non-implications and list every other cell.

    ``levels`` may override the level range per cell, e.g.
    ``{("P8", "P7"): range(1, 7)}``.
    """
    levels = levels or {}
    entries = tuple(lookup(a, b) for a in BASE for b in BASE)
    results = tuple(verify_witness(cell, check, threshold, levels.get(cell))
                    for cell, check in WITNESSES.items())
    failures = tuple(f for r in results for f in r.failures)
    return TableReport(entries, results, threshold, failures)
