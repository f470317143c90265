"""Counting nonzero rationals of bounded height in an interval, and field-family kernels."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

import sympy

from .curves import parse_poly, poly_eval
from .exactnum import Q
from .quadfield import squarefree_kernel

Number = Union[int, Fraction, float]


def _floor(x) -> int:
    return math.floor(Q(x)) if not isinstance(x, float) else math.floor(x)


def _ceil(x) -> int:
    return math.ceil(Q(x)) if not isinstance(x, float) else math.ceil(x)


def _check_interval(alpha, beta):
    if not alpha < beta:
        raise ValueError("need alpha < beta")


def count_rationals(T: Number, alpha: Number, beta: Number) -> int:
    """#{r in Q*, alpha <= r <= beta, H(r) <= T}, by walking denominators."""
    alpha, beta = Q(alpha), Q(beta)
    _check_interval(alpha, beta)
    Tf = _floor(T)
    total = 0
    gcd = math.gcd
    for b in range(1, Tf + 1):
        lo = max(_ceil(alpha * b), -Tf)
        hi = min(_floor(beta * b), Tf)
        if lo > hi:
            continue
        if b == 1:
            total += hi - lo + 1 - (1 if lo <= 0 <= hi else 0)
            continue
        # gcd(0, b) = b > 1, so zero drops out on its own
        total += sum(1 for a in range(lo, hi + 1) if gcd(a, b) == 1)
    return total


def _mobius_table(n: int) -> list[int]:
    mu = [1] * (n + 1)
    is_comp = [False] * (n + 1)
    primes = []
    mu[0] = 0
    for i in range(2, n + 1):
        if not is_comp[i]:
            primes.append(i)
            mu[i] = -1
        for p in primes:
            if i * p > n:
                break
            is_comp[i * p] = True
            if i % p == 0:
                mu[i * p] = 0
                break
            mu[i * p] = -mu[i]
    return mu


def _lattice_points(Y: int, alpha: Fraction, beta: Fraction) -> int:
    """#{(a, b): 1 <= b <= Y, |a| <= Y, a != 0, alpha b <= a <= beta b}."""
    total = 0
    for b in range(1, Y + 1):
        lo = max(_ceil(alpha * b), -Y)
        hi = min(_floor(beta * b), Y)
        if lo <= hi:
            total += hi - lo + 1 - (1 if lo <= 0 <= hi else 0)
    return total


def count_rationals_mobius(T: Number, alpha: Number, beta: Number) -> int:
    """Second route: Moebius inversion over the common divisor of numerator and denominator."""
    alpha, beta = Q(alpha), Q(beta)
    _check_interval(alpha, beta)
    Tf = _floor(T)
    mu = _mobius_table(Tf)
    return sum(mu[d] * _lattice_points(Tf // d, alpha, beta) for d in range(1, Tf + 1) if mu[d])


def lattice_count_S(X: Number, eta: Number) -> tuple[int, Union[Fraction, float]]:
    """S(X) = sum over 1 <= y <= X of floor(eta y), and g(X) = eta X (X+1)/2 - S(X)."""
    eta = Q(eta)
    if not (0 < eta <= 1):
        raise ValueError("eta must lie in (0, 1]")
    if X < 1:
        raise ValueError("X must be at least 1")
    Xq = X if isinstance(X, float) else Q(X)
    S = sum((eta * y).__floor__() for y in range(1, _floor(Xq) + 1))
    g = eta * Xq * (Xq + 1) / 2 - S if not isinstance(Xq, float) else float(eta) * Xq * (Xq + 1) / 2 - S
    assert 0 <= g < 2 * Xq, f"residual g({X}) = {g} outside [0, 2X)"
    return S, g


def residuals(X_max: int, eta: Number) -> Iterable[tuple[int, int, Fraction]]:
    """(X, S(X), g(X)) for integer X = 1..X_max, computed incrementally."""
    eta = Q(eta)
    S = 0
    for X in range(1, X_max + 1):
        S += (eta * X).__floor__()
        yield X, S, eta * X * (X + 1) / 2 - S


# ------------------------------------------------------ asymptotic constant

@dataclass(frozen=True)
class ZetaMultiple:
    """coeff / zeta(2), with zeta(2) = pi^2/6 kept symbolic."""

    coeff: Fraction
    steps: tuple = field(default=(), compare=False)

    @property
    def value(self) -> float:
        return float(self.coeff) * 6 / math.pi ** 2

    def over_pi_squared(self) -> Fraction:
        """The rational r with constant = r / pi^2."""
        return self.coeff * 6

    def __add__(self, other: "ZetaMultiple") -> "ZetaMultiple":
        return ZetaMultiple(self.coeff + other.coeff, self.steps + other.steps)

    def __str__(self):
        r = self.over_pi_squared()
        return f"{r}/pi^2" if r.denominator == 1 else f"{r.numerator}/({r.denominator}*pi^2)"


def asymptotic_constant(alpha: Number, beta: Number) -> ZetaMultiple:
    """c with N(T; alpha, beta) ~ c T^2, by negation, inversion and splitting down to [0, eta]."""
    alpha, beta = Q(alpha), Q(beta)
    if alpha == beta:
        # a single point contributes nothing to the T^2 term
        return ZetaMultiple(Fraction(0), (f"point {alpha}",))
    _check_interval(alpha, beta)
    if beta <= 0:
        c = asymptotic_constant(-beta, -alpha)
        return ZetaMultiple(c.coeff, (f"negate [{alpha},{beta}]",) + c.steps)
    if alpha < 0:
        return (ZetaMultiple(Fraction(0), (f"split [{alpha},{beta}] at 0",))
                + asymptotic_constant(0, -alpha) + asymptotic_constant(0, beta))
    if alpha > 1:
        c = asymptotic_constant(1 / beta, 1 / alpha)
        return ZetaMultiple(c.coeff, (f"invert [{alpha},{beta}]",) + c.steps)
    if beta > 1:
        return (ZetaMultiple(Fraction(0), (f"split [{alpha},{beta}] at 1",))
                + asymptotic_constant(alpha, 1) + asymptotic_constant(1 / beta, 1))
    # 0 <= alpha < beta <= 1: N(0, beta) - N(0, alpha), base case eta / (2 zeta(2))
    return ZetaMultiple((beta - alpha) / 2, (f"base [{alpha},{beta}]",))


# ---------------------------------------------------------- field families

@dataclass(frozen=True)
class KernelSample:
    x: Fraction
    value: Fraction
    D: int
    degenerate: bool


def field_family_kernels(poly: Union[str, Sequence], xs: Iterable[Number]) -> list[KernelSample]:
    """Squarefree kernel of p(x) for each x; a square value (kernel 1) or 0 is degenerate."""
    coeffs = parse_poly(poly) if isinstance(poly, str) else [Q(c) for c in poly]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) < 4:
        raise ValueError("polynomial must have degree at least 3")
    xs_ = sympy.Symbol("x")
    P = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(coeffs)], xs_)
    if sympy.discriminant(P) == 0:
        raise ValueError("polynomial has a repeated root")
    out = []
    for x in xs:
        x = Q(x)
        v = poly_eval(coeffs, x)
        if v == 0:
            out.append(KernelSample(x, v, 0, True))
            continue
        D = squarefree_kernel(v)
        out.append(KernelSample(x, v, D, D == 1))
    return out


__all__ = [
    "count_rationals", "count_rationals_mobius", "lattice_count_S", "residuals",
    "ZetaMultiple", "asymptotic_constant", "KernelSample", "field_family_kernels",
]
