import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from preper.counting import (ZetaMultiple, asymptotic_constant, count_rationals,
                             count_rationals_mobius, field_family_kernels, lattice_count_S,
                             residuals)
from preper.param import F_13, F_16, F_18


def _brute(T, a, b):
    return len({Fraction(p, q) for q in range(1, T + 1) for p in range(-T, T + 1)
                if p and a <= Fraction(p, q) <= b})


@pytest.mark.parametrize("T, a, b, n", [(5, 0, 1, 10), (5, -1, 1, 20), (1, 0, 1, 1)])
def test_count_examples(T, a, b, n):
    assert count_rationals(T, a, b) == n == _brute(T, Fraction(a), Fraction(b))
    assert count_rationals_mobius(T, a, b) == n


endpoints = st.fractions(min_value=-5, max_value=5, max_denominator=12)


@given(st.integers(1, 40), endpoints, endpoints)
def test_count_routes_agree(T, a, b):
    if a >= b:
        a, b = b - 1, a
    n = count_rationals(T, a, b)
    assert n == count_rationals_mobius(T, a, b)
    assert n == count_rationals(T, -b, -a)
    if T <= 15:
        assert n == _brute(T, a, b)


@given(st.integers(1, 300))
def test_inversion_step(T):
    assert abs(count_rationals(T, 1, 2) - count_rationals(T, Fraction(1, 2), 1)) <= 1


def test_density_at_2000():
    ratio = count_rationals(2000, 0, 1) / 2000 ** 2
    assert abs(ratio - 3 / math.pi ** 2) < 0.05 * 3 / math.pi ** 2
    assert count_rationals_mobius(2000, 0, 1) == count_rationals(2000, 0, 1)


@pytest.mark.parametrize("X, eta, S, g", [(3, 1, 6, 0), (4, Fraction(1, 2), 4, 1)])
def test_lattice_examples(X, eta, S, g):
    assert lattice_count_S(X, eta) == (S, g)


def test_lattice_third():
    S, g = lattice_count_S(10, Fraction(1, 3))
    assert S == sum((y // 3) for y in range(1, 11)) == 15
    assert 0 <= g < 20


def test_residual_bound_exhaustive():
    for k in range(1, 11):
        eta = Fraction(k, 10)
        S_direct = 0
        for X, S, g in residuals(10_000, eta):
            S_direct += (k * X) // 10
            assert S == S_direct
            assert 0 <= g < 2 * X, (X, eta)


def test_lattice_rejects_bad_eta():
    with pytest.raises(ValueError):
        lattice_count_S(5, 0)
    with pytest.raises(ValueError):
        lattice_count_S(5, Fraction(3, 2))


@pytest.mark.parametrize("a, b, r", [(0, 1, 3), (-1, 1, 6), (1, 2, Fraction(3, 2)),
                                     (Fraction(1, 2), 1, Fraction(3, 2)), (-3, -1, 2),
                                     (-2, 5, 6 + Fraction(3, 2) + Fraction(12, 5))])
def test_asymptotic_constants(a, b, r):
    # r is the rational with constant r / pi^2; each unit interval contributes 3/pi^2
    # and [1, t] for t > 1 contributes (1 - 1/t) * 3/pi^2
    c = asymptotic_constant(a, b)
    assert c.over_pi_squared() == r
    assert abs(c.value - float(r) / math.pi ** 2) < 1e-12


def test_constant_strings():
    assert str(asymptotic_constant(0, 1)) == "3/pi^2"
    assert str(asymptotic_constant(1, 2)) == "3/(2*pi^2)"
    assert isinstance(asymptotic_constant(-1, 1), ZetaMultiple)


def test_constant_matches_empirical():
    for a, b in [(1, 2), (-3, Fraction(1, 2)), (Fraction(1, 3), 4)]:
        c = asymptotic_constant(a, b).value
        emp = count_rationals(2000, a, b) / 2000 ** 2
        assert abs(emp - c) < 0.05 * c


@pytest.mark.parametrize("poly, x, D", [(F_18, 2, 337), (F_16, 5, -455), (F_13, 1, 17)])
def test_kernel_examples(poly, x, D):
    (s,) = field_family_kernels(poly, [x])
    assert s.D == D and not s.degenerate


def test_kernels_diversify():
    rnd = random.Random(11)
    xs = [Fraction(rnd.randint(-200, 200), rnd.randint(1, 50)) for _ in range(100)]
    for poly in (F_13, F_16, F_18):
        ks = field_family_kernels(poly, xs)
        assert len({s.D for s in ks if not s.degenerate}) >= 60


def test_kernel_degenerate_and_errors():
    ks = field_family_kernels(F_16, [0, 1, -1])
    assert ks[0].degenerate and ks[0].value == 0
    assert ks[1].D == 1 and ks[1].degenerate  # F16(1) = 4
    with pytest.raises(ValueError):
        field_family_kernels("x^2+1", [1])
    with pytest.raises(ValueError):
        field_family_kernels("(x-1)^2*(x+1)", [2])
