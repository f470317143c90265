"""Bounded-height enumeration in Q, in a quadratic field, and of quadratic integers."""
from __future__ import annotations

import json
import math
from fractions import Fraction
from functools import cmp_to_key
from typing import Iterable, Iterator

from .exactnum import Q, Surd, as_surd, compare_surd, fmt_q
from .heights import mahler_quadratic, relative_height
from .quadfield import QuadElement, QuadField, make_field, squarefree_kernel


def rationals_of_bounded_height(B) -> list[Fraction]:
    """All x in Q with H(x) <= B, sorted by (height, value)."""
    n = math.floor(Q(B))
    out = [Fraction(0)]
    for q in range(1, n + 1):
        for p in range(1, n + 1):
            if math.gcd(p, q) == 1:
                out.append(Fraction(p, q))
                out.append(Fraction(-p, q))
    out.sort(key=lambda x: (max(abs(x.numerator), x.denominator), x))
    return out


def _exact_sort(items: list[tuple[Surd, QuadElement]]) -> list[tuple[Surd, QuadElement]]:
    """Sort by (H exact, a, b): float key first, then exact repair of near ties."""
    items.sort(key=lambda t: (float(t[0]), t[1].a, t[1].b))
    out, i = [], 0
    while i < len(items):
        j = i + 1
        f0 = float(items[i][0])
        while j < len(items) and float(items[j][0]) - f0 <= 1e-9 * max(1.0, f0):
            j += 1
        block = items[i:j]
        if len(block) > 1:
            block.sort(key=cmp_to_key(lambda s, t: compare_surd(s[0], t[0])
                                      or (s[1].a > t[1].a) - (s[1].a < t[1].a)
                                      or (s[1].b > t[1].b) - (s[1].b < t[1].b)))
        out.extend(block)
        i = j
    return out


def _minpoly_triples(D: int, B: Fraction) -> Iterator[tuple[int, int, int, int]]:
    """Primitive (a, b, c, k) with H_K <= B for the roots (-b +- k sqrt(D))/(2a).

    a t^2 + b t + c with 1 <= a <= B, |c| <= B, |b| <= 2B and b^2 - 4ac = D k^2.
    Loops over (a, k) and solves b^2 = D k^2 mod 4a from a table of square roots.
    """
    bound = as_surd(B)
    fB = float(B)
    nB = math.floor(B)
    bmax = math.floor(2 * B)
    sqD = math.sqrt(abs(D))
    for a in range(1, nB + 1):
        m = 4 * a
        roots: dict[int, list[int]] = {}
        for r in range(m):
            roots.setdefault(r * r % m, []).append(r)
        # |c| <= B  <=>  D k^2 - 4aB <= b^2 <= D k^2 + 4aB
        if D > 0:
            kmax = math.isqrt((bmax * bmax + m * nB) // D)
        else:
            kmax = math.isqrt(m * nB // (-D))
        for k in range(1, kmax + 1):
            dk2 = D * k * k
            rs = roots.get(dk2 % m)
            if not rs:
                continue
            lo2, hi2 = max(0, dk2 - m * nB), min(bmax * bmax, dk2 + m * nB)
            if lo2 > hi2:
                continue
            blo = math.isqrt(lo2)
            if blo * blo < lo2:
                blo += 1
            bhi = math.isqrt(hi2)
            spans = [(blo, bhi)]
            if bhi >= max(blo, 1):
                spans.append((-bhi, -max(blo, 1)))
            w = k * sqD / (2 * a)
            for r in rs:
                for lo, hi in spans:
                    for b in range(lo + (r - lo) % m, hi + 1, m):
                        c = (b * b - dk2) // m
                        if math.gcd(math.gcd(a, b), c) != 1:
                            continue
                        # float screen, exact decision near the boundary
                        if D < 0:
                            approx = float(max(a, abs(c)))
                        else:
                            h0 = -b / (2 * a)
                            approx = a * max(1.0, abs(h0 + w)) * max(1.0, abs(h0 - w))
                        if approx > fB * (1 + 1e-9):
                            continue
                        if approx > fB * (1 - 1e-9) and \
                                compare_surd(mahler_quadratic(a, b, c, D), bound) > 0:
                            continue
                        yield a, b, c, k


def iter_elements_of_bounded_height(K: QuadField, B) -> Iterator[QuadElement]:
    """Unsorted stream of all x in K with H_K(x) <= B (rationals first)."""
    B = Q(B)
    for r in rationals_of_bounded_height(math.isqrt(math.floor(B))):
        yield K(r)
    for a, b, c, k in _minpoly_triples(K.D, B):
        x1 = QuadElement(K, Fraction(-b, 2 * a), Fraction(k, 2 * a))
        yield x1
        yield x1.conj()


def elements_of_bounded_height(K: QuadField, B, with_heights: bool = False):
    """All x in K with H_K(x) <= B, sorted by (H_K exact, a, b)."""
    B = Q(B)
    items = [(relative_height(K(r)), K(r))
             for r in rationals_of_bounded_height(math.isqrt(math.floor(B)))]
    for a, b, c, k in _minpoly_triples(K.D, B):
        h = mahler_quadratic(a, b, c, K.D)
        x1 = QuadElement(K, Fraction(-b, 2 * a), Fraction(k, 2 * a))
        items.append((h, x1))
        items.append((h, x1.conj()))
    items = _exact_sort(items)
    if with_heights:
        return items
    return [x for _, x in items]


def quadratic_integers_of_bounded_abs_height(B) -> list[tuple[int, int]]:
    """Monic irreducible t^2 + a1 t + a0 with |a0| <= B^2, |a1| <= 2B^2 and roots of height <= B."""
    B = Q(B)
    B2 = B * B
    n0 = math.floor(B2)
    n1 = math.floor(2 * B2)
    bound = as_surd(B2)
    out = []
    for a1 in range(-n1, n1 + 1):
        for a0 in range(-n0, n0 + 1):
            disc = a1 * a1 - 4 * a0
            if disc >= 0 and math.isqrt(disc) ** 2 == disc:
                continue
            if compare_surd(mahler_quadratic(1, a1, a0), bound) <= 0:
                out.append((a1, a0))
    return out


def roots_of_monic(a1: int, a0: int) -> tuple[QuadElement, QuadElement]:
    """The two roots of t^2 + a1 t + a0 in their quadratic field."""
    disc = a1 * a1 - 4 * a0
    K = make_field(disc)
    s = Fraction(disc, K.D)
    k = Fraction(math.isqrt(s.numerator), 1)
    x = QuadElement(K, Fraction(-a1, 2), k / 2)
    return x, x.conj()


def to_json_lines(items: Iterable[tuple[Surd, QuadElement]]) -> Iterator[str]:
    for h, x in items:
        yield json.dumps({"a": fmt_q(x.a), "b": fmt_q(x.b), "H": str(h)})


__all__ = [
    "rationals_of_bounded_height",
    "elements_of_bounded_height",
    "iter_elements_of_bounded_height",
    "quadratic_integers_of_bounded_abs_height",
    "roots_of_monic",
    "squarefree_kernel",
]
