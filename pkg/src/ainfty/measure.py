"""Finite atomic measure spaces carrying a basis and a weight.

All quantities are exact :class:`fractions.Fraction` values.  An
:class:`Instance` is immutable; derived tables (incidence lists, the integer
normalisation, per-base class profiles) are computed lazily and cached.
"""
from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union

from .errors import InvalidSet, UncoveredAtom, ValidationError

Rational = Fraction
RationalLike = Union[int, Fraction, str]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def as_rational(value: RationalLike) -> Fraction:
    """Coerce ``value`` to a Fraction without ever going through a float.

    Accepts ints, Fractions and strings of the form ``"p"`` or ``"p/q"``.
    Floats and decimal literals are rejected.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        m = _RATIONAL_RE.match(value)
        if m is None:
            raise ValueError(f"not an exact rational 'p/q': {value!r}")
        den = int(m.group(2)) if m.group(2) is not None else 1
        if den == 0:
            raise ValueError(f"zero denominator: {value!r}")
        return Fraction(int(m.group(1)), den)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Atom:
    id: str
    measure: Fraction


@dataclass(frozen=True)
class BaseRef:
    index: int
    name: str
    atoms: frozenset


def _distinct_objects(values) -> dict[int, object]:
    # Fraction hashing is slow; large instances share value objects, so
    # deduplicate by identity before anything hashes by value
    return {id(v): v for v in values}


def _primitive_integers(values: Sequence[Fraction]) -> tuple[list[int], Fraction]:
    """Return (ints, unit) with ``values[i] == ints[i] * unit`` and gcd(ints) == 1."""
    objects = _distinct_objects(values)
    distinct = set(objects.values())
    lcm = math.lcm(*{v.denominator for v in distinct}) if distinct else 1
    scaled = {v: v.numerator * (lcm // v.denominator) for v in distinct}
    g = math.gcd(*scaled.values()) if scaled else 0
    if g == 0:
        g = 1
    by_id = {i: scaled[v] // g for i, v in objects.items()}
    return [by_id[id(v)] for v in values], Fraction(g, lcm)


class Instance:
    """A finite measure space {atoms}, a covering basis and a weight.

    ``atoms`` is an iterable of :class:`Atom` or ``(id, measure)`` pairs,
    ``weight`` maps every atom id to a nonnegative rational and ``basis`` is
    an iterable of ``(name, atom ids)`` pairs.
    """

    def __init__(
        self,
        atoms: Iterable[Atom | tuple[str, RationalLike]],
        weight: Mapping[str, RationalLike],
        basis: Iterable[tuple[str, Iterable[str]]],
    ):
        ids: list[str] = []
        measures: list[Fraction] = []
        for a in atoms:
            if isinstance(a, Atom):
                aid, mu = a.id, a.measure
            else:
                aid, mu = a
            ids.append(str(aid))
            measures.append(as_rational(mu))
        index = {aid: i for i, aid in enumerate(ids)}
        if len(index) != len(ids):
            dup = next(a for a, c in Counter(ids).items() if c > 1)
            raise ValidationError(f"duplicate atom id {dup!r}")
        extra = set(weight) - index.keys()
        if extra:
            raise ValidationError(f"weight given for unknown atom {sorted(extra)[0]!r}")
        weights = []
        for aid in ids:
            if aid not in weight:
                raise ValidationError(f"no weight value for atom {aid!r}")
            weights.append(as_rational(weight[aid]))
        names: list[str] = []
        members: list[tuple[int, ...]] = []
        for name, element in basis:
            try:
                idx = {index[a] for a in element}
            except KeyError as e:
                raise ValidationError(f"basis element {name!r} names unknown atom {e.args[0]!r}") from None
            names.append(str(name))
            members.append(tuple(sorted(idx)))
        self._setup(ids, measures, weights, names, members)
        self.__dict__["index"] = index

    @classmethod
    def from_indexed(cls, ids, measures, weights, base_names, members, canonical=False) -> Instance:
        """Build from parallel sequences; ``members`` holds atom indices per base.

        With ``canonical`` the member tuples are trusted to be strictly
        increasing already.
        """
        self = cls.__new__(cls)
        if not canonical:
            members = [tuple(sorted(set(m))) for m in members]
        self._setup(list(ids), list(measures), list(weights), list(base_names), list(members))
        return self

    def _setup(self, ids, measures, weights, names, members):
        n = len(ids)
        if len(measures) != n or len(weights) != n:
            raise ValidationError("ids, measures and weights differ in length")
        if len(set(ids)) != n:
            raise ValidationError("duplicate atom id")
        # distinct values first; name the first offending atom only on failure
        bad = {id(v) for v in _distinct_objects(measures).values() if not isinstance(v, Fraction) or v <= 0}
        if bad:
            aid = ids[next(i for i, v in enumerate(measures) if id(v) in bad)]
            raise ValidationError(f"non-positive or inexact measure for atom {aid!r}")
        bad = {id(v) for v in _distinct_objects(weights).values() if not isinstance(v, Fraction) or v < 0}
        if bad:
            aid = ids[next(i for i, v in enumerate(weights) if id(v) in bad)]
            raise ValidationError(f"negative or inexact weight for atom {aid!r}")
        if len(set(names)) != len(names):
            raise ValidationError("duplicate basis element name")
        covered = bytearray(n)
        for name, m in zip(names, members):
            if not m:
                raise ValidationError(f"empty basis element {name!r}")
            if m[0] < 0 or m[-1] >= n:
                raise ValidationError(f"basis element {name!r} has an invalid atom index")
            if len(m) == 2:
                covered[m[0]] = covered[m[1]] = 1
            else:
                for i in m:
                    covered[i] = 1
        if n and not all(covered):
            raise ValidationError(f"covering violated: atom {ids[covered.index(0)]!r} lies in no basis element")
        if n == 0:
            raise ValidationError("instance has no atoms")
        self.ids = tuple(ids)
        self.measures = tuple(measures)
        self.weights = tuple(weights)
        self.base_names = tuple(names)
        self.members = tuple(members)

    def __repr__(self):
        return f"Instance({len(self.ids)} atoms, {len(self.members)} bases)"

    @property
    def num_atoms(self) -> int:
        return len(self.ids)

    @property
    def num_bases(self) -> int:
        return len(self.members)

    @property
    def atoms(self) -> list[Atom]:
        return [Atom(a, m) for a, m in zip(self.ids, self.measures)]

    @property
    def weight(self) -> dict[str, Fraction]:
        return dict(zip(self.ids, self.weights))

    @property
    def basis(self) -> list[tuple[str, frozenset]]:
        return [(name, frozenset(self.ids[i] for i in m)) for name, m in zip(self.base_names, self.members)]

    @cached_property
    def index(self) -> dict[str, int]:
        return {a: i for i, a in enumerate(self.ids)}

    @cached_property
    def base_index(self) -> dict[str, int]:
        return {b: i for i, b in enumerate(self.base_names)}

    def base(self, key: int | str | BaseRef) -> BaseRef:
        if isinstance(key, BaseRef):
            key = key.index
        if isinstance(key, str):
            if key not in self.base_index:
                raise InvalidSet(f"no basis element named {key!r}")
            key = self.base_index[key]
        if not 0 <= key < len(self.members):
            raise InvalidSet(f"basis index {key} out of range")
        return BaseRef(key, self.base_names[key], frozenset(self.ids[i] for i in self.members[key]))

    def resolve(self, atom_ids: Iterable[str]) -> list[int]:
        idx = self.index
        try:
            return [idx[a] for a in atom_ids]
        except KeyError as e:
            raise InvalidSet(f"unknown atom id {e.args[0]!r}") from None

    def with_weight(self, weights: Sequence[Fraction]) -> Instance:
        return Instance.from_indexed(self.ids, self.measures, weights, self.base_names, self.members)

    def with_measure(self, measures: Sequence[Fraction]) -> Instance:
        return Instance.from_indexed(self.ids, measures, self.weights, self.base_names, self.members)

    def with_basis(self, base_names, members) -> Instance:
        return Instance.from_indexed(self.ids, self.measures, self.weights, base_names, members)

    # -- cached derived tables -------------------------------------------

    @cached_property
    def incidence(self) -> list[list[int]]:
        """Basis elements containing each atom, ascending."""
        inc: list[list[int]] = [[] for _ in self.ids]
        for b, m in enumerate(self.members):
            for i in m:
                inc[i].append(b)
        return inc

    @cached_property
    def scaled(self):
        """Primitive integer vectors proportional to the measure and the weight.

        Returns ``(mu, w, mu_unit, w_unit)`` with ``measures[i] == mu[i]*mu_unit``
        and ``weights[i] == w[i]*w_unit``.  Every condition constant is invariant
        under rescaling either vector, so evaluators work on these integers.
        """
        mu, mu_unit = _primitive_integers(self.measures)
        w, w_unit = _primitive_integers(self.weights)
        return mu, w, mu_unit, w_unit

    @cached_property
    def profiles(self):
        """Group bases by the multiset of (weight, measure) values they contain.

        Returns ``(profile_of_base, profiles, first_base)`` where each profile
        is a tuple of ``(w, mu, count)`` over scaled integers sorted by
        ``(w, mu)``, and ``first_base[k]`` is the first base with profile ``k``.
        """
        mu, w, _, _ = self.scaled
        class_ids: dict[tuple[int, int], int] = {}
        cls = [class_ids.setdefault(pair, len(class_ids)) for pair in zip(w, mu)]
        classes = [None] * len(class_ids)
        for pair, k in class_ids.items():
            classes[k] = pair
        lookup: dict[tuple, int] = {}
        profile_of_base = []
        profiles = []
        first_base = []
        for b, m in enumerate(self.members):
            if len(m) == 2:
                c0, c1 = cls[m[0]], cls[m[1]]
                key = (c0, c1) if c0 <= c1 else (c1, c0)
            elif len(m) <= 8:
                key = tuple(sorted([cls[i] for i in m]))
            else:
                key = tuple(sorted(Counter([cls[i] for i in m]).items()))
            k = lookup.get(key)
            if k is None:
                k = lookup[key] = len(profiles)
                counts = Counter([cls[i] for i in m])
                profiles.append(tuple(sorted((classes[c][0], classes[c][1], n) for c, n in counts.items())))
                first_base.append(b)
            profile_of_base.append(k)
        return profile_of_base, profiles, first_base


BaseLike = Union[int, str, BaseRef]


def _base_members(instance: Instance, base: BaseLike) -> tuple[int, ...]:
    return instance.members[instance.base(base).index]


def integral(instance: Instance, atoms: Iterable[str], f: Mapping[str, Fraction] | None = None) -> Fraction:
    """Integral of ``f`` (the weight when ``f`` is None) over a set of atom ids.

    Atom ids missing from ``f`` count as zero.
    """
    idx = instance.resolve(set(atoms))
    if f is None:
        return sum((instance.weights[i] * instance.measures[i] for i in idx), Fraction(0))
    return sum((as_rational(f.get(instance.ids[i], 0)) * instance.measures[i] for i in idx), Fraction(0))


def measure_of(instance: Instance, atoms: Iterable[str]) -> Fraction:
    return sum((instance.measures[i] for i in instance.resolve(set(atoms))), Fraction(0))


def average(instance: Instance, base: BaseLike) -> Fraction:
    m = _base_members(instance, base)
    total = sum((instance.measures[i] for i in m), Fraction(0))
    return sum((instance.weights[i] * instance.measures[i] for i in m), Fraction(0)) / total


def median(instance: Instance, base: BaseLike) -> Fraction:
    """inf{t : |{x in B : w(x) > t}| < |B|/2}, found by scanning 0 and the weight values."""
    m = _base_members(instance, base)
    half = sum((instance.measures[i] for i in m), Fraction(0)) / 2
    for t in sorted({Fraction(0)} | {instance.weights[i] for i in m}):
        above = sum((instance.measures[i] for i in m if instance.weights[i] > t), Fraction(0))
        if above < half:
            return t
    raise AssertionError("unreachable: the top weight value always qualifies")


def maximal_function(instance: Instance, f: Mapping[str, Fraction], x: str) -> Fraction:
    """Maximal average of ``f`` over basis elements containing atom ``x``."""
    (i,) = instance.resolve([x])
    bases = instance.incidence[i]
    if not bases:
        raise UncoveredAtom(f"atom {x!r} lies in no basis element")
    best = None
    for b in bases:
        m = instance.members[b]
        num = sum((as_rational(f.get(instance.ids[j], 0)) * instance.measures[j] for j in m), Fraction(0))
        avg = num / sum((instance.measures[j] for j in m), Fraction(0))
        if best is None or avg > best:
            best = avg
    return best


def restricted_weight(instance: Instance, base: BaseLike) -> dict[str, Fraction]:
    """The function w * indicator(B) as an atom-id map."""
    m = _base_members(instance, base)
    return {instance.ids[i]: instance.weights[i] for i in m}
