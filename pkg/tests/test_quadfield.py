from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from preper.exactnum import rational_sqrt
from preper.quadfield import (EvenResidueCharacteristic, PerfectSquareInput, QuadElement,
                              ZeroInput, format_element, is_square_in_completion, make_field,
                              ord_ideal, parse_element, primes_above, qvaluation, split_kind,
                              splitting_type, sqrt_in_field, squarefree_kernel)

from .strategies import elements, fields

SMALL_PRIMES = list(sympy.primerange(2, 100))


@pytest.mark.parametrize("d, D, disc", [(12, 3, 12), (5, 5, 5), (-1, -1, -4), (-28, -7, -7)])
def test_make_field(d, D, disc):
    K = make_field(d)
    assert (K.D, K.disc) == (D, disc)


def test_omega():
    assert make_field(5).omega == make_field(5)(Fraction(1, 2), Fraction(1, 2))
    assert make_field(2).omega == make_field(2).sqrtD()


@pytest.mark.parametrize("d", [4, 9, 1, 36, Fraction(25, 4)])
def test_perfect_square_rejected(d):
    with pytest.raises(PerfectSquareInput):
        make_field(d)


@pytest.mark.parametrize("D, a, b, n", [
    (-7, Fraction(1, 2), Fraction(1, 2), 2),
    (5, Fraction(1, 2), Fraction(1, 2), -1),
    (3, Fraction(2, 3), 0, Fraction(4, 9)),
])
def test_norm_examples(D, a, b, n):
    assert QuadElement(make_field(D), a, b).norm() == n


@given(elements(), elements())
def test_norm_trace_galois(x, y):
    y = QuadElement(x.K, y.a, y.b)
    assert x.conj().norm() == x.norm()
    assert x.conj().trace() == x.trace()
    assert (x * y).norm() == x.norm() * y.norm()


@pytest.mark.parametrize("D, p, kind", [(-7, 2, "split"), (5, 3, "inert"), (5, 5, "ramified")])
def test_splitting_examples(D, p, kind):
    Ps = splitting_type(make_field(D), p)
    assert {P.kind for P in Ps} == {kind}
    assert len(Ps) == (2 if kind == "split" else 1)
    assert all(P.residue_field_size == (p * p if kind == "inert" else p) for P in Ps)


# sympy's modular factorization emits an internal deprecation warning
@pytest.mark.filterwarnings("ignore::DeprecationWarning")
@pytest.mark.parametrize("D", [-7, -5, -3, -2, -1, 2, 3, 5, 13, 17, 33])
def test_splitting_matches_factorization(D):
    K = make_field(D)
    t1, t0 = K.omega_poly
    t = sympy.Symbol("t")
    for p in sympy.primerange(2, 1000):
        _, factors = sympy.factor_list(t ** 2 - t1 * t - t0, modulus=p)
        shape = sorted((sympy.degree(f, t), m) for f, m in factors)
        want = {((2, 1),): "inert", ((1, 2),): "ramified", ((1, 1), (1, 1)): "split"}[tuple(shape)]
        assert split_kind(K, p) == want, (D, p)


def test_split_roots_are_hensel_lifts():
    K = make_field(-7)
    for P in primes_above(K, 2):
        r = P.hensel_root(12)
        t1, t0 = K.omega_poly
        assert (r * r - t1 * r - t0) % 2 ** 12 == 0


@pytest.mark.parametrize("D, x, p, want", [
    (-7, Fraction(3, 16), 2, -4),
    (2, Fraction(-15, 8), 2, -6),
])
def test_ord_examples(D, x, p, want):
    K = make_field(D)
    assert all(ord_ideal(K(x), P) == want for P in primes_above(K, p))


def test_ord_ramified_sqrt5():
    K = make_field(5)
    (P,) = primes_above(K, 5)
    assert ord_ideal(K.omega + 2, P) == 1
    assert ord_ideal(K(5), P) == 2


def test_ord_zero_raises():
    K = make_field(5)
    with pytest.raises(ZeroInput):
        ord_ideal(K(0), primes_above(K, 5)[0])


@given(elements(nonzero=True), st.sampled_from(SMALL_PRIMES))
def test_local_degrees_sum_to_norm_valuation(x, p):
    # sum of f(P) * ord_P(x) over P | p equals v_p(N(x))
    total = sum(P.f * ord_ideal(x, P) for P in primes_above(x.K, p))
    assert total == qvaluation(x.norm(), p)


@given(elements(nonzero=True), elements(nonzero=True), st.sampled_from(SMALL_PRIMES[:10]))
def test_ord_additive(x, y, p):
    y = QuadElement(x.K, y.a, y.b)
    for P in primes_above(x.K, p):
        assert ord_ideal(x * y, P) == ord_ideal(x, P) + ord_ideal(y, P)


def _f9_squares():
    # F_9 = F_3[w] / (w^2 - w - 1); elements as pairs (a, b) meaning a + b w
    def mul(u, v):
        a, b = u
        c, d = v
        # b d w^2 = b d (w + 1)
        return ((a * c + b * d) % 3, (a * d + b * c + b * d) % 3)
    return {mul((a, b), (a, b)) for a in range(3) for b in range(3)}


def test_square_tests():
    K2 = make_field(-2)  # 3 splits, residue field F_3
    P3 = primes_above(K2, 3)[0]
    assert not is_square_in_completion(K2(2), P3)
    assert is_square_in_completion(K2(4), P3)
    K5 = make_field(5)
    (P,) = primes_above(K5, 3)
    # omega is a non-square in F_9 (omega^4 = -1 there)
    assert (0, 1) not in _f9_squares()
    assert not is_square_in_completion(K5.omega, P)
    assert is_square_in_completion(K5.omega ** 2, P)
    assert is_square_in_completion(K5(4), P)


def test_square_test_rejects_two():
    K = make_field(-7)
    with pytest.raises(EvenResidueCharacteristic):
        is_square_in_completion(K(3), primes_above(K, 2)[0])


@given(elements())
def test_sqrt_in_field(x):
    r = sqrt_in_field(x * x)
    assert r is not None and r * r == x * x


@given(fields, st.integers(-10**6, 10**6).filter(bool))
def test_squarefree_kernel(K, n):
    k = squarefree_kernel(n)
    assert rational_sqrt(Fraction(n, k)) is not None
    assert all(k % (q * q) for q in range(2, 50))


@given(elements())
def test_element_serialization_round_trip(x):
    assert parse_element(format_element(x), x.K) == x
    assert parse_element(str(x), x.K) == x


def test_field_str():
    assert str(make_field(-5)) == "Q(sqrt(-5))"
