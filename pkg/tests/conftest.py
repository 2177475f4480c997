import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from ainfty.measure import Instance  # noqa: E402

MEASURES = [Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3), Fraction(1, 3), Fraction(5, 4)]
WEIGHTS = [Fraction(1), Fraction(2), Fraction(5), Fraction(1, 2), Fraction(3, 7), Fraction(9), Fraction(1, 8)]


def random_instance(rng: random.Random, max_atoms=12, max_bases=5, zero_weight=False) -> Instance:
    """Small instance; values come from short pools so classes repeat."""
    n = rng.randint(1, max_atoms)
    nb = rng.randint(1, max_bases)
    measures = [rng.choice(MEASURES) for _ in range(n)]
    pool = WEIGHTS + ([Fraction(0)] if zero_weight else [])
    weights = [rng.choice(pool) for _ in range(n)]
    members = []
    for _ in range(nb):
        k = rng.randint(1, n)
        members.append(rng.sample(range(n), k))
    covered = {i for m in members for i in m}
    for i in range(n):
        if i not in covered:
            members[rng.randrange(nb)].append(i)
    return Instance.from_indexed([f"a{i}" for i in range(n)], measures, weights,
                                 [f"B{b}" for b in range(nb)], members)


def random_instances(count, seed, **kw):
    rng = random.Random(seed)
    return [random_instance(rng, **kw) for _ in range(count)]


@st.composite
def instances(draw, max_atoms=8, max_bases=4, positive=True):
    n = draw(st.integers(1, max_atoms))
    measures = draw(st.lists(st.fractions(Fraction(1, 10), 10, max_denominator=12), min_size=n, max_size=n))
    lo = Fraction(1, 12) if positive else Fraction(0)
    weights = draw(st.lists(st.fractions(lo, 20, max_denominator=12), min_size=n, max_size=n))
    nb = draw(st.integers(1, max_bases))
    members = [draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=n, unique=True)) for _ in range(nb)]
    covered = {i for m in members for i in m}
    members[0] = members[0] + [i for i in range(n) if i not in covered]
    return Instance.from_indexed([f"a{i}" for i in range(n)], measures, weights,
                                 [f"B{b}" for b in range(nb)], members)


# -- acceptance summary lines -----------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_line():
    def record(number, passed, detail):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
