import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from preper.dynamics import preperiodic_points
from preper.enumeration import elements_of_bounded_height
from preper.exactnum import Surd
from preper.fixtures import appendix_rows
from preper.localtests import TestVerdict as Verdict
from preper.localtests import (ARCHIMEDEAN_ESCAPE, MAYBE, NO, VALUATION_MISMATCH, _escapes_complex,
                               _escapes_real, _in_inner_gap, _outside_real_interval,
                               _real_embeddings, context_for, parameter_admissible,
                               preperiodicity_test)
from preper.localtests import LocalContext, REAL_GAP
from preper.exactnum import compare_surd
from preper.quadfield import QuadElement, make_field

from .oracles import IterationOracle
from .strategies import rationals

SOUNDNESS_FIELDS = [d for d in range(-15, 16) if d not in (0, 1) and all(d % (k * k) for k in (2, 3))]


def test_verdict_needs_reason():
    with pytest.raises(ValueError):
        Verdict(NO)
    assert str(Verdict(NO, ARCHIMEDEAN_ESCAPE)) == "NO (archimedean-escape)"


@pytest.mark.parametrize("D, c, want", [
    (2, Fraction(1), False),
    (5, Fraction(1, 8), False),
    (-7, Fraction(1, 8), False),
    (2, Fraction(-15, 8), True),
    (5, Fraction(1, 4), True),
])
def test_parameter_admissible_examples(D, c, want):
    K = make_field(D)
    assert parameter_admissible(K(c)) is want


def test_preperiodicity_examples():
    K5 = make_field(5)
    v = preperiodicity_test(K5(2), K5(0))
    assert v.value == NO and v.reason == ARCHIMEDEAN_ESCAPE
    K2 = make_field(2)
    P = QuadElement(K2, Fraction(1, 2), Fraction(3, 4))
    c = K2(Fraction(-15, 8))
    assert preperiodicity_test(P, c).value == MAYBE
    assert P in preperiodic_points(c, K2)
    c5 = K5(Fraction(1, 5))
    # g/5 + 2/5 with g = (1 + sqrt(5))/2: ord at the prime over 5 is -1 = ord(c)/2
    P5 = K5.omega / 5 + Fraction(2, 5)
    assert preperiodicity_test(P5, c5).value == MAYBE
    assert P5 in preperiodic_points(c5, K5)


def test_literal_sqrt5_point_is_rejected():
    # 2 + sqrt(5) is a unit, so (sqrt(5) + 2)/5 has ord -2 at the prime over 5, not ord(c)/2 = -1
    K5 = make_field(5)
    c5 = K5(Fraction(1, 5))
    P = QuadElement(K5, Fraction(2, 5), Fraction(1, 5))
    v = preperiodicity_test(P, c5)
    assert v.value == NO and v.reason == VALUATION_MISMATCH
    assert P not in IterationOracle(K5, 25).preper(c5)


def test_boundary_is_maybe():
    # c = -2: the fixed point 2 sits exactly on the escape radius
    K = make_field(3)
    assert preperiodicity_test(K(2), K(-2)).value == MAYBE
    assert preperiodicity_test(K(Fraction(1, 2)), K(Fraction(1, 4))).value == MAYBE


def test_rows_are_never_rejected():
    for row in appendix_rows():
        for P in row.expanded_points():
            assert preperiodicity_test(P, row.c).value == MAYBE, (row.label, str(P))


def _mpq(x):
    return mpmath.mpf(x.numerator) / x.denominator


@given(rationals(40, 40), rationals(40, 40), rationals(40, 40), st.integers(0, 30))
def test_real_escape_matches_radical_form(p, q, s, r):
    x = Surd(p, q, Fraction(r))
    with mpmath.workdps(100):
        xv = abs(_mpq(p) + _mpq(q) * mpmath.sqrt(r))
        rhs = mpmath.mpf(1) / 2 + mpmath.sqrt(mpmath.mpf(1) / 4 + abs(_mpq(s)))
        if abs(xv - rhs) < mpmath.mpf(10) ** -80:
            return
        assert _escapes_real(x, Surd(s)) == (xv > rhs)


@given(rationals(40, 40).map(abs), rationals(40, 40).map(abs))
def test_complex_escape_matches_radical_form(n, s):
    with mpmath.workdps(100):
        lhs = mpmath.sqrt(_mpq(n)) - mpmath.mpf(1) / 2
        rhs = mpmath.sqrt(mpmath.mpf(1) / 4 + mpmath.sqrt(_mpq(s)))
        if abs(lhs - rhs) < mpmath.mpf(10) ** -80:
            return
        assert _escapes_complex(n, s) == (lhs > rhs)


def _soundness(D, Bc=50, inadmissible_sample=None, seed=0):
    """Every oracle point passes the tests; inadmissible c have no points."""
    K = make_field(D)
    oracle = IterationOracle(K, Bc)
    cs = elements_of_bounded_height(K, Bc)
    adm = [c for c in cs if parameter_admissible(c)]
    inadm = [c for c in cs if not parameter_admissible(c)]
    if inadmissible_sample is not None and len(inadm) > inadmissible_sample:
        inadm = random.Random(seed).sample(inadm, inadmissible_sample)
    for c in adm:
        ctx = context_for(c)
        for P in oracle.preper(c):
            assert ctx.test(P).value == MAYBE, (D, str(c), str(P))
    for c in inadm:
        assert not oracle.preper(c), (D, str(c))
    return len(adm), len(inadm)


@pytest.mark.parametrize("D", SOUNDNESS_FIELDS)
def test_soundness_against_iteration(D):
    _soundness(D, inadmissible_sample=60)


@pytest.mark.slow
@pytest.mark.parametrize("D", SOUNDNESS_FIELDS)
def test_soundness_against_iteration_all_parameters(D):
    _soundness(D)


def _exact_archimedean(c, P):
    """The archimedean tests with exact arithmetic only."""
    if not c.K.is_real:
        return ARCHIMEDEAN_ESCAPE if _escapes_complex(P.norm(), c.norm()) else None
    xs = _real_embeddings(P) * (2 if P.b == 0 else 1)
    ss = _real_embeddings(c) * (2 if c.b == 0 else 1)
    if any(_escapes_real(x, s) for x, s in zip(xs, ss)):
        return ARCHIMEDEAN_ESCAPE
    for x, s in zip(xs, ss):
        if _outside_real_interval(x, s):
            return REAL_GAP
        if compare_surd(s, Surd(-2)) < 0 and _in_inner_gap(x, s):
            return REAL_GAP
    return None


@pytest.mark.parametrize("D", [5, 2, 3, -1, -7, 13])
def test_float_screen_matches_exact(D):
    K = make_field(D)
    rnd = random.Random(D)
    pool = elements_of_bounded_height(K, 12)
    params = elements_of_bounded_height(K, 40)
    # borderline parameters: c = 1/4, -2, -3/4 and points on the interval ends
    params += [K(Fraction(1, 4)), K(-2), K(Fraction(-3, 4)), K(Fraction(-15, 4))]
    for c in rnd.sample(params[:-4], 60) + params[-4:]:
        ctx = LocalContext(c)
        pts = rnd.sample(pool, 80) + [K(Fraction(1, 2)), K(Fraction(-1, 2)), K(2), K(Fraction(3, 2)), K(Fraction(5, 2))]
        for P in pts:
            assert ctx.archimedean_verdict(P) == _exact_archimedean(c, P), (c, P)
