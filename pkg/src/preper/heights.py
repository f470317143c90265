"""Relative and absolute heights on quadratic fields, via Mahler measures."""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .exactnum import Q, Surd, as_surd, compare_surd
from .quadfield import QuadElement, squarefree_kernel

HeightValue = Surd

# phi**4 = (7 + 3*sqrt(5))/2
PHI4 = Surd(Fraction(7, 2), Fraction(3, 2), Fraction(5))


def format_height(h: HeightValue) -> str:
    """Serialize as "m*(p+q*sqrt(r))" with m = 1 after folding."""
    return f"1*({h})"


def primitive_minpoly(x: QuadElement) -> tuple[int, int, int]:
    """(a, b, c) with a > 0, gcd 1 and a t^2 + b t + c the minimal polynomial of x.

    For rational x = p/q returns (0, q, -p) as a degenerate linear form.
    """
    if x.b == 0:
        r = x.a
        return 0, r.denominator, -r.numerator
    t, n = x.trace(), x.norm()
    den = t.denominator * n.denominator // math.gcd(t.denominator, n.denominator)
    a, b, c = den, int(-t * den), int(n * den)
    g = math.gcd(math.gcd(a, b), c)
    return a // g, b // g, c // g


def mahler_quadratic(a: int, b: int, c: int, D: Optional[int] = None) -> Surd:
    """Mahler measure of the irreducible integer quadratic a t^2 + b t + c.

    D is the squarefree kernel of the discriminant; the result lives in Q(sqrt(D)).
    """
    a_abs = abs(a)
    disc = b * b - 4 * a * c
    if disc < 0:
        # |root|^2 = c/a for both roots
        return Surd(abs(c)) if abs(c) >= a_abs else Surd(a_abs)
    if D is None:
        D = _kernel(disc)
    k = math.isqrt(disc // D)
    # real roots (-b +- k sqrt(D))/(2a)
    r1 = Surd(Fraction(-b, 2 * a), Fraction(k, 2 * a), D)
    r2 = Surd(Fraction(-b, 2 * a), Fraction(-k, 2 * a), D)
    big1 = compare_surd(abs(r1), as_surd(1)) >= 0
    big2 = compare_surd(abs(r2), as_surd(1)) >= 0
    if big1 and big2:
        return Surd(abs(c))
    if not big1 and not big2:
        return Surd(a_abs)
    big = r1 if big1 else r2
    return abs(big) * a_abs


@lru_cache(maxsize=65536)
def _kernel(n: int) -> int:
    return squarefree_kernel(n)


def relative_height(x: QuadElement) -> HeightValue:
    """H_K(x) for x in a quadratic field K."""
    if x.b == 0:
        r = x.a
        h = max(abs(r.numerator), r.denominator)
        return Surd(Fraction(h * h))
    return mahler_quadratic(*primitive_minpoly(x), D=x.K.D)


def absolute_height_below(x: QuadElement, bound) -> bool:
    """H(x) < bound, exactly, where H is the absolute Weil height."""
    bound = Q(bound)
    return compare_surd(relative_height(x), as_surd(bound * bound)) < 0


def sign_with_sqrt(u: Surd, v: Surd, s: int) -> int:
    """Sign of u + v*sqrt(s) with u, v surds sharing one radicand."""
    su, sv = u.sign(), v.sign()
    if sv == 0:
        return su
    if su == 0 or su == sv:
        return sv
    d = compare_surd(u * u, v * v * s)
    return su * d


def preper_height_bound_holds(P: QuadElement, c: QuadElement) -> bool:
    """H_K(P)^2 <= phi^4 * H_K(c), decided exactly."""
    hp = relative_height(P)
    hc = relative_height(c)
    lhs = hp * hp
    # lhs - phi^4 hc = (lhs - 7/2 hc) + (-3/2 hc) sqrt(5)
    u = lhs - hc * Fraction(7, 2)
    v = hc * Fraction(-3, 2)
    return sign_with_sqrt(u, v, 5) <= 0


def candidate_height_limit(hc: Surd) -> int:
    """Integer B with phi^2 * sqrt(H_K(c)) <= B (used to size candidate pools)."""
    phi2 = (3 + math.sqrt(5)) / 2
    return math.ceil(phi2 * math.sqrt(float(hc)) * (1 + 1e-12)) + 1
