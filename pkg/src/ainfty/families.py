"""Counterexample families and the half-line lifting.

Three families, each indexed by a level ``n >= 1``:

``lemma1``
    atoms ``x_n_0`` (measure 2, weight n) and ``x_n_1`` (measure 1, weight 1),
    one base ``B_n`` holding both.  Median-type control without a
    geometric-mean bound.
``lemma2``
    ``x_n_0`` (measure 1, weight 1) and ``x_n_i``, ``1 <= i <= 4**n``, of
    measure and weight ``2**-n``; base ``B_n_0`` holds every atom of the
    level, ``B_n_i`` the pair ``{x_n_0, x_n_i}``.
``lemma3``
    counting measure on ``x_n_0 .. x_n_{m_n}`` with ``m_n = 4 + ... + 4**n``;
    ``w(x_n_0) = 1`` and ``w(x_n_i) = 2**-j`` for ``m_{j-1} < i <= m_j``;
    bases as in ``lemma2``.

``cumulative`` mode takes the disjoint union of levels ``1..n``.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from itertools import accumulate

from .errors import InvalidSet, ParameterError, ValidationError
from .measure import Instance

FAMILIES = ("lemma1", "lemma2", "lemma3")
SINGLE = "single"
CUMULATIVE = "cumulative"


@dataclass(frozen=True)
class FamilySpec:
    name: str
    n: int
    mode: str = SINGLE

    def __post_init__(self):
        if self.name not in FAMILIES:
            raise ParameterError(f"unknown family {self.name!r}")
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise ParameterError(f"level must be a positive integer, got {self.n!r}")
        if self.mode not in (SINGLE, CUMULATIVE):
            raise ParameterError(f"unknown mode {self.mode!r}")


def m_level(n: int) -> int:
    """m_n = 4 + 4**2 + ... + 4**n (m_0 = 0)."""
    return (4 ** (n + 1) - 4) // 3


def _lemma1(n, ids, measures, weights, names, members):
    start = len(ids)
    ids += [f"x_{n}_0", f"x_{n}_1"]
    measures += [Fraction(2), Fraction(1)]
    weights += [Fraction(n), Fraction(1)]
    names.append(f"B_{n}")
    members.append((start, start + 1))


def _pair_bases(n, start, count, names, members):
    names.append(f"B_{n}_0")
    members.append(tuple(range(start, start + count + 1)))
    names += [f"B_{n}_{i}" for i in range(1, count + 1)]
    members += [(start, start + i) for i in range(1, count + 1)]


def _lemma2(n, ids, measures, weights, names, members):
    start = len(ids)
    count = 4**n
    small = Fraction(1, 2**n)
    ids += [f"x_{n}_{i}" for i in range(count + 1)]
    measures += [Fraction(1)] + [small] * count
    weights += [Fraction(1)] + [small] * count
    _pair_bases(n, start, count, names, members)


def _lemma3(n, ids, measures, weights, names, members):
    start = len(ids)
    count = m_level(n)
    one = Fraction(1)
    ids += [f"x_{n}_{i}" for i in range(count + 1)]
    measures += [one] * (count + 1)
    weights.append(one)
    for j in range(1, n + 1):
        weights += [Fraction(1, 2**j)] * 4**j
    _pair_bases(n, start, count, names, members)


_BUILDERS = {"lemma1": _lemma1, "lemma2": _lemma2, "lemma3": _lemma3}


def make_family(spec: FamilySpec | str, n: int | None = None, mode: str = SINGLE) -> Instance:
    """Instance for one family level (or levels 1..n in cumulative mode).

    ``make_family("lemma2", 3)`` is shorthand for
    ``make_family(FamilySpec("lemma2", 3))``.
    """
    if not isinstance(spec, FamilySpec):
        spec = FamilySpec(spec, n, mode)
    ids, measures, weights, names, members = [], [], [], [], []
    levels = range(1, spec.n + 1) if spec.mode == CUMULATIVE else (spec.n,)
    for level in levels:
        _BUILDERS[spec.name](level, ids, measures, weights, names, members)
    return Instance.from_indexed(ids, measures, weights, names, members, canonical=True)


# -- lifting -------------------------------------------------------------------


def tau_layout(instance: Instance, order=None) -> list[tuple[str, Fraction, Fraction]]:
    """Lay atoms end to end on [0, total): atom j gets [sum_{i<j} a_i, sum_{i<=j} a_i)."""
    if order is None:
        idx = list(range(instance.num_atoms))
    else:
        order = list(order)
        idx = instance.resolve(order)
        if len(set(idx)) != len(idx) or len(idx) != instance.num_atoms:
            raise InvalidSet("atom order must be a permutation of all atoms")
    ends = list(accumulate((instance.measures[i] for i in idx), initial=Fraction(0)))
    return [(instance.ids[i], ends[k], ends[k + 1]) for k, i in enumerate(idx)]


def tau(layout, atom_id: str, t) -> Fraction:
    """Image of the point (atom, t), t in [0,1), on the half-line."""
    t = Fraction(t)
    if not 0 <= t < 1:
        raise ValueError("t must lie in [0,1)")
    for aid, left, right in layout:
        if aid == atom_id:
            return left + t * (right - left)
    raise InvalidSet(f"atom {atom_id!r} is not in the layout")


def tau_inverse(layout, s) -> tuple[str, Fraction]:
    """The (atom, t) mapped to the half-line point ``s``."""
    s = Fraction(s)
    lefts = [left for _, left, _ in layout]
    k = bisect_right(lefts, s) - 1
    if k < 0 or s >= layout[-1][2]:
        raise ValueError(f"{s} lies outside the layout")
    aid, left, right = layout[k]
    return aid, (s - left) / (right - left)


@dataclass(frozen=True)
class LiftedInstance:
    """Piecewise-constant weight on [0, L) with a basis of interval unions.

    ``intervals`` holds ``(left, right, weight)``; ``basis`` holds
    ``(name, interval indices)``.
    """

    intervals: tuple
    basis: tuple

    def __post_init__(self):
        pos = Fraction(0)
        for left, right, w in self.intervals:
            if left != pos or right <= left:
                raise ValidationError("intervals must be consecutive, nonempty and start at 0")
            if w < 0:
                raise ValidationError("negative weight")
            pos = right
        for name, idx in self.basis:
            if not idx:
                raise ValidationError(f"empty basis element {name!r}")

    @property
    def length(self) -> Fraction:
        return self.intervals[-1][1] if self.intervals else Fraction(0)

    def to_instance(self) -> Instance:
        """Intervals as atoms carrying their Lebesgue length."""
        ids = [f"I{k}" for k in range(len(self.intervals))]
        return Instance.from_indexed(
            ids,
            [right - left for left, right, _ in self.intervals],
            [w for _, _, w in self.intervals],
            [name for name, _ in self.basis],
            [idx for _, idx in self.basis],
        )


def lift(instance: Instance) -> LiftedInstance:
    layout = tau_layout(instance)
    intervals = tuple((left, right, instance.weights[k]) for k, (_, left, right) in enumerate(layout))
    basis = tuple(zip(instance.base_names, instance.members))
    return LiftedInstance(intervals, basis)
