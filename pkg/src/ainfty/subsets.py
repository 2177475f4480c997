"""Extremal-subset search shared by the subset-quantified conditions.

A basis element is handed over as a *profile*: a tuple of ``(w, mu, count)``
classes over the instance's scaled integers.  Each objective depends on a
subset ``E`` only through ``|E|`` and ``w(E)``, hence only through how many
atoms of each class it takes, which is what makes ``class-exact`` exact.

Strategies
----------
brute
    all ``2**|B|`` subsets, enumerated atom by atom.
class-exact
    all count vectors ``(k_1, ..., k_r)`` with ``0 <= k_j <= count_j``.
level-set
    prefixes of the atoms sorted by weight value; a lower bound only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ParameterError, StrategyInfeasible, ZeroWeightBase
from .measure import BaseLike, Instance

BRUTE = "brute"
CLASS_EXACT = "class-exact"
LEVEL_SET = "level-set"
STRATEGIES = (BRUTE, CLASS_EXACT, LEVEL_SET)

BRUTE_LIMIT = 20
CLASS_LIMIT = 10**7

_INT64_SAFE = 2**62


@dataclass(frozen=True)
class Objective:
    """``kind`` is one of ``p1-prime``, ``p3-prime``, ``p4-budget``."""

    kind: str
    param: Fraction

    def __post_init__(self):
        if self.kind not in ("p1-prime", "p3-prime", "p4-budget"):
            raise ParameterError(f"unknown objective {self.kind!r}")
        if self.kind == "p4-budget" and not 0 < self.param < 1:
            raise ParameterError("alpha must lie in (0,1)")
        if self.kind != "p4-budget" and self.param <= 0:
            raise ParameterError("delta must be positive")

    @property
    def exact(self) -> bool:
        return self.kind == "p4-budget" or self.param.denominator == 1

    @property
    def allows_empty(self) -> bool:
        return self.kind == "p4-budget"

    def exact_value(self, e_mu: int, e_w: int, total_mu: int, total_w: int):
        """The objective for one subset, as a Fraction (or inf)."""
        if self.kind == "p4-budget":
            return Fraction(e_w, total_w)
        d = int(self.param)
        if self.kind == "p1-prime":
            if e_w == 0:
                return math.inf
            return Fraction(e_mu * total_w**d, total_mu * e_w**d)
        return Fraction(e_w * total_mu**d, total_w * e_mu**d)

    def float_value(self, e_mu: int, e_w: int, total_mu: int, total_w: int) -> float:
        v = self._evaluate(np.array([e_mu], dtype=object), np.array([e_w], dtype=object), total_mu, total_w)
        return float(v[0])

    def _evaluate(self, e_mu, e_w, total_mu, total_w):
        """Vectorised float objective; infeasible subsets get -inf."""
        rel_mu = _ratio(e_mu, total_mu)
        rel_w = _ratio(e_w, total_w)
        delta = float(self.param)
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.kind == "p1-prime":
                out = rel_mu / rel_w**delta
                out[(rel_w == 0) & (rel_mu > 0)] = np.inf
            elif self.kind == "p3-prime":
                out = rel_w / rel_mu**delta
            else:
                a = self.param
                feasible = _lt_scaled(e_mu, a.denominator, a.numerator * total_mu)
                out = np.where(feasible, rel_w, -np.inf)
        return out


def _ratio(values, total) -> np.ndarray:
    if values.dtype == object:
        return np.array([v / total for v in values], dtype=np.float64)
    return values / float(total) if total < 2**53 else np.array([int(v) / total for v in values])


def _lt_scaled(values, factor, bound):
    if values.dtype == object or bound >= _INT64_SAFE:
        return np.array([v * factor < bound for v in values], dtype=bool)
    return values * factor < bound


def _dtype_for(profile, objective: Objective):
    total_mu = sum(mu * c for _, mu, c in profile)
    total_w = sum(w * mu * c for w, mu, c in profile)
    bound = max(total_mu * objective.param.denominator, total_w, 1)
    return np.int64 if bound < _INT64_SAFE else object


def class_combinations(profile) -> int:
    return math.prod(c + 1 for _, _, c in profile)


def choose_strategy(profile, strategy: str | None, brute_limit=BRUTE_LIMIT, class_limit=CLASS_LIMIT) -> str:
    size = sum(c for _, _, c in profile)
    if strategy is None:
        strategy = BRUTE if size <= brute_limit else CLASS_EXACT
    if strategy == BRUTE:
        if size > brute_limit:
            raise StrategyInfeasible(f"brute search over {size} atoms exceeds the bound {brute_limit}")
    elif strategy == CLASS_EXACT:
        combos = class_combinations(profile)
        if combos > class_limit:
            raise StrategyInfeasible(f"class-exact search needs {combos} count vectors, bound is {class_limit}")
    elif strategy != LEVEL_SET:
        raise ParameterError(f"unknown strategy {strategy!r}")
    return strategy


def _candidates_brute(profile, dtype):
    """Sums over all subsets of the expanded atom list.

    Bit ``k`` of the array index says whether expanded atom ``k`` is taken.
    """
    atoms = [(w, mu) for w, mu, c in profile for _ in range(c)]
    e_mu = np.zeros(1, dtype=dtype)
    e_w = np.zeros(1, dtype=dtype)
    for w, mu in atoms:
        e_mu = np.concatenate([e_mu, e_mu + mu])
        e_w = np.concatenate([e_w, e_w + w * mu])

    def counts(index):
        out = []
        k = 0
        for _, _, c in profile:
            out.append(sum((index >> (k + j)) & 1 for j in range(c)))
            k += c
        return tuple(out)

    return e_mu, e_w, counts


def _candidates_class(profile, dtype):
    e_mu = np.zeros(1, dtype=dtype)
    e_w = np.zeros(1, dtype=dtype)
    for w, mu, c in profile:
        k = np.arange(c + 1, dtype=np.int64).astype(dtype)
        e_mu = (e_mu[:, None] + k * mu).ravel()
        e_w = (e_w[:, None] + k * (w * mu)).ravel()
    shape = tuple(c + 1 for _, _, c in profile)

    def counts(index):
        return tuple(int(k) for k in np.unravel_index(int(index), shape))

    return e_mu, e_w, counts


def level_order(profile, objective: Objective) -> list[int]:
    """Class order for prefix candidates: ascending weight for p1-prime, else descending.

    Ties keep ascending measure.
    """
    order = sorted(range(len(profile)), key=lambda k: (profile[k][0], profile[k][1]))
    if objective.kind != "p1-prime":
        order = sorted(range(len(profile)), key=lambda k: (-profile[k][0], profile[k][1]))
    return order


def _candidates_level(profile, objective, dtype):
    order = level_order(profile, objective)
    mus = np.repeat(np.array([profile[k][1] for k in order], dtype=dtype),
                    [profile[k][2] for k in order])
    wmus = np.repeat(np.array([profile[k][0] * profile[k][1] for k in order], dtype=dtype),
                     [profile[k][2] for k in order])
    e_mu = np.concatenate([np.zeros(1, dtype=dtype), np.cumsum(mus)])
    e_w = np.concatenate([np.zeros(1, dtype=dtype), np.cumsum(wmus)])

    def counts(length):
        out = [0] * len(profile)
        left = int(length)
        for k in order:
            take = min(left, profile[k][2])
            out[k] = take
            left -= take
        return tuple(out)

    return e_mu, e_w, counts


@dataclass(frozen=True)
class SearchResult:
    value: object  # Fraction, float or math.inf
    counts: tuple  # atoms taken from each profile class
    e_mu: int
    e_w: int
    strategy: str


def search_profile(profile, objective: Objective, strategy: str | None = None,
                   brute_limit=BRUTE_LIMIT, class_limit=CLASS_LIMIT) -> SearchResult:
    """Supremum of ``objective`` over subsets of one basis element."""
    strategy = choose_strategy(profile, strategy, brute_limit, class_limit)
    total_mu = sum(mu * c for _, mu, c in profile)
    total_w = sum(w * mu * c for w, mu, c in profile)
    dtype = _dtype_for(profile, objective)
    if strategy == BRUTE:
        e_mu, e_w, counts = _candidates_brute(profile, dtype)
    elif strategy == CLASS_EXACT:
        e_mu, e_w, counts = _candidates_class(profile, dtype)
    else:
        e_mu, e_w, counts = _candidates_level(profile, objective, dtype)
    values = objective._evaluate(e_mu, e_w, total_mu, total_w)
    if not objective.allows_empty:
        values[0] = -np.inf
    best_index = int(np.argmax(values))
    best = values[best_index]
    if objective.exact and np.isfinite(best):
        # float screen, then exact comparison among the near-ties
        near = np.flatnonzero(values >= best * (1 - 1e-9)) if best > 0 else [best_index]
        seen = {}
        for i in near:
            seen.setdefault((int(e_mu[i]), int(e_w[i])), int(i))
        best_value = None
        for (m, w), i in seen.items():
            v = objective.exact_value(m, w, total_mu, total_w)
            if best_value is None or v > best_value or (v == best_value and i < best_index):
                best_value, best_index = v, i
        value = best_value
    elif np.isinf(best):
        value = math.inf
    else:
        value = float(best)
    return SearchResult(value, counts(best_index), int(e_mu[best_index]), int(e_w[best_index]), strategy)


def subset_from_counts(instance: Instance, base_index: int, profile, counts) -> tuple[str, ...]:
    """Concrete witness: the first ``counts[k]`` atoms (instance order) of each class."""
    mu, w, _, _ = instance.scaled
    want = {(profile[k][0], profile[k][1]): counts[k] for k in range(len(profile))}
    out = []
    for i in instance.members[base_index]:
        key = (w[i], mu[i])
        if want.get(key, 0) > 0:
            want[key] -= 1
            out.append(instance.ids[i])
    return tuple(out)


def extremal_subset(instance: Instance, base: BaseLike, objective: Objective, strategy: str | None = None,
                    brute_limit=BRUTE_LIMIT, class_limit=CLASS_LIMIT):
    """Return ``(value, subset)`` maximising ``objective`` over subsets of ``base``."""
    b = instance.base(base).index
    profile_of_base, profiles, _ = instance.profiles
    profile = profiles[profile_of_base[b]]
    if sum(w * mu * c for w, mu, c in profile) == 0:
        raise ZeroWeightBase(objective.kind, instance.base_names[b])
    res = search_profile(profile, objective, strategy, brute_limit, class_limit)
    return res.value, subset_from_counts(instance, b, profile, res.counts)
