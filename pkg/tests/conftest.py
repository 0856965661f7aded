import random
from fractions import Fraction

import pytest

from timelike.ratfunc import RationalFunction
from timelike.period import WeierstrassPair, assemble_bicomplex

Z = RationalFunction.variable()

# lines printed by the acceptance suite, shown in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def z():
    return Z


@pytest.fixture
def ref_pair():
    return WeierstrassPair(-Z, -1 / (Z * Z))


@pytest.fixture
def ref_data(ref_pair):
    return assemble_bicomplex(ref_pair, ref_pair)


def small_fraction(rng: random.Random, num=6, den=4) -> Fraction:
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def random_real_g(rng: random.Random, poles, max_order=2, poly_degree=None) -> RationalFunction:
    """Real-coefficient g with a pole at every entry of ``poles`` and a pole at infinity."""
    deg = rng.randint(1, 2) if poly_degree is None else poly_degree
    coeffs = [small_fraction(rng) for _ in range(deg)] + [Fraction(rng.choice([-2, -1, 1, 2, 3]))]
    g = RationalFunction.from_coeffs(coeffs)
    for p in poles:
        order = rng.randint(1, max_order)
        c = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 3))
        g = g + RationalFunction.pole_term(c, p, order)
    return g


def distinct_real_poles(rng: random.Random, k, span=6):
    pts = set()
    while len(pts) < k:
        pts.add(Fraction(rng.randint(-4 * span, 4 * span), 4))
    return sorted(pts)
