from fractions import Fraction

import pytest

from ainfty.errors import InvalidSet, UncoveredAtom, ValidationError
from ainfty.families import make_family
from ainfty.measure import (
    Atom,
    Instance,
    as_rational,
    average,
    format_rational,
    integral,
    maximal_function,
    measure_of,
    median,
    restricted_weight,
)


def unit_instance(ws, basis=None):
    ids = [f"x{i}" for i in range(len(ws))]
    basis = basis or [("B", ids)]
    return Instance([(i, 1) for i in ids], dict(zip(ids, ws)), basis)


class TestRationals:
    @pytest.mark.parametrize("text,value", [("3/4", Fraction(3, 4)), ("5", Fraction(5)), (" -2 / 6 ", Fraction(-1, 3))])
    def test_strings(self, text, value):
        assert as_rational(text) == value

    @pytest.mark.parametrize("bad", ["0.5", "1e3", "1/0", "a/b", ""])
    def test_rejects_inexact_strings(self, bad):
        with pytest.raises(ValueError):
            as_rational(bad)

    def test_rejects_floats(self):
        with pytest.raises(TypeError):
            as_rational(0.5)
        with pytest.raises(TypeError):
            as_rational(True)

    def test_format(self):
        assert format_rational(Fraction(6, 4)) == "3/2"
        assert format_rational(Fraction(3)) == "3/1"


class TestInstanceValidation:
    def test_duplicate_id(self):
        with pytest.raises(ValidationError, match="duplicate"):
            Instance([("a", 1), ("a", 2)], {"a": 1}, [("B", ["a"])])

    def test_nonpositive_measure(self):
        with pytest.raises(ValidationError, match="measure"):
            Instance([("a", 0)], {"a": 1}, [("B", ["a"])])

    def test_negative_weight(self):
        with pytest.raises(ValidationError, match="weight"):
            Instance([("a", 1)], {"a": "-1/2"}, [("B", ["a"])])

    def test_empty_base(self):
        with pytest.raises(ValidationError, match="empty"):
            Instance([("a", 1)], {"a": 1}, [("B", ["a"]), ("E", [])])

    def test_uncovered(self):
        with pytest.raises(ValidationError, match="cover"):
            Instance([("a", 1), ("b", 1)], {"a": 1, "b": 1}, [("B", ["a"])])

    def test_unknown_atom_in_base(self):
        with pytest.raises(ValidationError, match="unknown"):
            Instance([("a", 1)], {"a": 1}, [("B", ["a", "z"])])

    def test_missing_weight(self):
        with pytest.raises(ValidationError):
            Instance([("a", 1), ("b", 1)], {"a": 1}, [("B", ["a", "b"])])

    def test_duplicate_base_name(self):
        with pytest.raises(ValidationError):
            Instance([("a", 1)], {"a": 1}, [("B", ["a"]), ("B", ["a"])])

    def test_accessors(self):
        inst = Instance([Atom("a", Fraction(2)), ("b", "1/3")], {"a": 1, "b": "2/5"}, [("B", ["b", "a"])])
        assert inst.num_atoms == 2 and inst.num_bases == 1
        assert inst.atoms == [Atom("a", Fraction(2)), Atom("b", Fraction(1, 3))]
        assert inst.weight == {"a": Fraction(1), "b": Fraction(2, 5)}
        assert inst.basis == [("B", frozenset({"a", "b"}))]
        assert list(inst.members) == [(0, 1)]
        assert inst.base("B").index == 0 and inst.base(0).name == "B"
        with pytest.raises(InvalidSet):
            inst.resolve(["nope"])


class TestScaled:
    def test_primitive_integers(self):
        inst = Instance([("a", "2/3"), ("b", "4/9")], {"a": "3/2", "b": "9/4"}, [("B", ["a", "b"])])
        mu, w, mu_unit, w_unit = inst.scaled
        assert mu == [3, 2] and mu_unit == Fraction(2, 9)
        assert w == [2, 3] and w_unit == Fraction(3, 4)

    def test_zero_weights(self):
        inst = unit_instance([0, 0])
        assert inst.scaled[1] == [0, 0]

    def test_profiles_shared(self):
        inst = make_family("lemma2", 2)
        profile_of_base, profiles, first = inst.profiles
        assert len(profiles) == 2
        assert first == [0, 1]
        assert set(profile_of_base[1:]) == {1}


class TestFunctionals:
    def test_integral_lemma1(self):
        # w(B_n) = 2n + 1
        inst = make_family("lemma1", 5)
        assert integral(inst, inst.ids) == 11

    def test_integral_unit_weight(self):
        inst = Instance([("a", "1/2"), ("b", 3)], {"a": 1, "b": 1}, [("B", ["a", "b"])])
        assert integral(inst, ["a", "b"]) == measure_of(inst, ["a", "b"]) == Fraction(7, 2)

    def test_integral_lemma3(self):
        inst = make_family("lemma3", 3)
        assert integral(inst, inst.ids) == 2**4 - 1

    def test_integral_of_function(self):
        inst = unit_instance([1, 2])
        assert integral(inst, ["x0", "x1"], {"x1": Fraction(5)}) == 5

    def test_average(self):
        assert average(make_family("lemma1", 5), "B_5") == Fraction(11, 3)
        assert average(unit_instance([Fraction(7, 2)] * 3), "B") == Fraction(7, 2)
        assert average(make_family("lemma2", 3), "B_3_0") == Fraction(2, 9)

    def test_median(self):
        assert median(make_family("lemma1", 7), "B_7") == 7
        assert median(unit_instance([3, 3, 3]), "B") == 3
        assert median(unit_instance([1, 2, 5]), "B") == 2
        assert median(unit_instance([0, 0, 1]), "B") == 0

    def test_median_even_split(self):
        # {w > 1} has measure exactly half, which is not < half
        assert median(unit_instance([1, 1, 4, 4]), "B") == 4

    def test_maximal_single_base(self):
        inst = unit_instance([1, 2, 6])
        f = restricted_weight(inst, "B")
        assert {maximal_function(inst, f, x) for x in inst.ids} == {3}

    def test_maximal_lemma2(self):
        for n in (1, 2, 3):
            inst = make_family("lemma2", n)
            f = restricted_weight(inst, f"B_{n}_0")
            got = maximal_function(inst, f, f"x_{n}_1")
            assert got == (1 + Fraction(1, 4**n)) / (1 + Fraction(1, 2**n))
        inst = make_family("lemma2", 1)
        assert maximal_function(inst, restricted_weight(inst, "B_1_0"), "x_1_0") == Fraction(5, 6)

    def test_maximal_uncovered_id(self):
        inst = unit_instance([1])
        with pytest.raises(InvalidSet):
            maximal_function(inst, {}, "zz")
        assert issubclass(UncoveredAtom, ValueError)
