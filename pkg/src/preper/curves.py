"""Curve utilities: quadratic points on cubics, point counts mod p and Chabauty-type bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Optional, Sequence

import sympy
from sympy import Poly, jacobi_symbol
from sympy.parsing.sympy_parser import (convert_xor, implicit_multiplication_application,
                                        parse_expr, standard_transformations)

from .exactnum import Q, is_square, rational_sqrt


class BasePointNotOnCurve(ValueError):
    pass


class InconsistentInput(ValueError):
    pass


class BadReduction(ValueError):
    pass


class RankNotLessThanGenus(ValueError):
    pass


# ------------------------------------------------------------ expressions

_TRANSFORMS = standard_transformations + (convert_xor, implicit_multiplication_application)
_SYMBOLS = {name: sympy.Symbol(name) for name in ("x", "y", "z", "s", "g", "t", "p", "w")}


@lru_cache(maxsize=None)
def parse(text: str) -> sympy.Expr:
    """Parse "5g/6+1/12" or "2*(x^3+x^2-x+1)" into a sympy expression."""
    return parse_expr(text, local_dict=dict(_SYMBOLS), transformations=_TRANSFORMS, evaluate=True)


def evaluate(expr, env: Mapping[str, object]):
    """Evaluate a polynomial-rational sympy expression with exact field values.

    env maps symbol names to Fractions or QuadElements; only +, *, and integer
    powers (negative allowed) are supported, which keeps everything exact.
    """
    if isinstance(expr, str):
        expr = parse(expr)
    if expr.is_Integer:
        return Fraction(int(expr))
    if expr.is_Rational:
        return Fraction(int(expr.p), int(expr.q))
    if expr.is_Symbol:
        return env[expr.name]
    if expr.is_Add:
        out = Fraction(0)
        for a in expr.args:
            out = evaluate(a, env) + out
        return out
    if expr.is_Mul:
        out = Fraction(1)
        for a in expr.args:
            out = evaluate(a, env) * out
        return out
    if expr.is_Pow and expr.exp.is_Integer:
        base = evaluate(expr.base, env)
        n = int(expr.exp)
        if n >= 0:
            return base ** n
        return 1 / (base ** (-n))
    raise ValueError(f"unsupported expression {expr}")


def parse_poly(text: str, var: str = "x") -> list[Fraction]:
    """Coefficients, constant term first, of a univariate polynomial."""
    P = Poly(parse(text), _SYMBOLS[var])
    coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(P.all_coeffs())]
    return coeffs


def poly_eval(coeffs: Sequence, x):
    out = Fraction(0)
    for c in reversed(coeffs):
        out = out * x + c
    return out


# ------------------------------------------------------ hyperelliptic data

@dataclass(frozen=True)
class HyperellipticModel:
    """d * y^2 = f(x), f given by coefficients from the constant term up."""

    coeffs: tuple
    d: Fraction = Fraction(1)

    def __post_init__(self):
        cs = [Q(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "d", Q(self.d))
        if self.disc() == 0:
            raise ValueError("f has a repeated root")

    @classmethod
    def from_text(cls, text: str, d=1) -> "HyperellipticModel":
        return cls(tuple(parse_poly(text)), Q(d))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def genus(self) -> int:
        return (self.degree - 1) // 2

    def sympy_poly(self) -> Poly:
        x = _SYMBOLS["x"]
        return Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(self.coeffs)], x)

    def disc(self) -> Fraction:
        dv = sympy.discriminant(self.sympy_poly())
        return Fraction(int(dv.p), int(dv.q))

    def __call__(self, x):
        return poly_eval(self.coeffs, x)


def count_points_mod_p(model: HyperellipticModel, p: int) -> int:
    """Points over F_p on the smooth model of d*y^2 = f(x), p odd.

    Affine points: sum over x of 1 + chi(d f(x)). At infinity: one point for odd
    degree; for even degree two or none by the square class of d * leading coeff.
    """
    if p == 2:
        raise BadReduction("p must be odd")
    den = 1
    for c in model.coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    if model.d.numerator % p == 0 or model.d.denominator % p == 0 or den % p == 0:
        raise BadReduction(f"coefficients not integral at {p}")
    cs = [int(c * den) % p for c in model.coeffs]
    if cs[-1] == 0:
        raise BadReduction(f"leading coefficient vanishes mod {p}")
    disc = model.disc()
    if disc.numerator % p == 0:
        raise BadReduction(f"discriminant vanishes mod {p}")
    dd = model.d.numerator * pow(model.d.denominator, -1, p) % p
    # d y^2 = f(x) has 1 + chi(f(x) * d * den) solutions y, f * den integral
    scale = dd * den % p
    total = 0
    for x in range(p):
        v = 0
        for c in reversed(cs):
            v = (v * x + c) % p
        total += 1 + int(jacobi_symbol(v * scale % p, p))
    if model.degree % 2:
        total += 1
    else:
        total += 1 + int(jacobi_symbol(cs[-1] * scale % p, p))
    return total


def count_points_brute(model: HyperellipticModel, p: int) -> int:
    """Affine solutions by direct search plus the same points at infinity (test oracle)."""
    dd = model.d.numerator * pow(model.d.denominator, -1, p) % p
    squares = {}
    for y in range(p):
        squares[y * y % p] = squares.get(y * y % p, 0) + 1
    total = 0
    for x in range(p):
        fx = 0
        for c in reversed(model.coeffs):
            fx = (fx * x + c.numerator * pow(c.denominator, -1, p)) % p
        # d y^2 = f(x)
        target = fx * pow(dd, -1, p) % p
        total += squares.get(target, 0)
    lead = model.coeffs[-1]
    lc = lead.numerator * pow(lead.denominator, -1, p) % p
    if model.degree % 2:
        total += 1
    else:
        ratio = lc * pow(dd, -1, p) % p
        total += 2 if ratio in squares else 0
    return total


# ------------------------------------------------------------ bounds

NOT_APPLICABLE = "not applicable"


@dataclass
class Bounds:
    coleman: object = NOT_APPLICABLE
    lt_exact: object = NOT_APPLICABLE
    lt: object = NOT_APPLICABLE
    stoll: object = NOT_APPLICABLE

    def best(self) -> Optional[int]:
        vals = [v for v in (self.coleman, self.lt, self.stoll) if isinstance(v, int)]
        return min(vals) if vals else None


def chabauty_bounds(g: int, r: int, p: int, d: int, count: int) -> Bounds:
    """Upper bounds for #X(Q) from #X(F_p): Coleman, Lorenzini-Tucker and Stoll."""
    if r >= g:
        raise RankNotLessThanGenus(f"rank {r} is not below genus {g}")
    out = Bounds()
    if p > 2 * g:
        out.coleman = count + 2 * g - 2
    if p > d and p ** d > 2 * g - 1 + d:
        exact = count + Fraction(p - 1, p - d) * (2 * g - 2)
        out.lt_exact = exact
        out.lt = math.floor(exact)
    if p > 2 * r + 2:
        out.stoll = count + 2 * r
    return out


def apply_parity(bound: int, parity: Optional[str]) -> int:
    """Largest n <= bound with the required parity ("odd", "even" or None)."""
    if parity is None:
        return bound
    want = 1 if parity == "odd" else 0
    return bound if bound % 2 == want else bound - 1


def nonobvious_count(j: int, c: int, w: int) -> int:
    """q = 2j - 2 + w - c^2 non-obvious quadratic points on a genus 2 curve."""
    q = 2 * j - 2 + w - c * c
    if q < 0 or q % 2:
        raise InconsistentInput(f"q = {q} must be even and nonnegative")
    return q


# ------------------------------------------------------- elliptic curves

@dataclass(frozen=True)
class QuadPointFamily:
    base: tuple
    v: Fraction
    A: Fraction
    B: Fraction
    degenerate: bool

    def line(self, x):
        x0, y0 = self.base
        return y0 + self.v * (x - x0)

    def __str__(self):
        return f"t^2 + ({self.A})t + ({self.B})"


def quad_point_family(curve: Sequence, base: Sequence, v) -> QuadPointFamily:
    """Quadratic points on y^2 = a x^3 + b x^2 + c x + d cut out by the line through base with slope v."""
    a, b, c, d = (Q(t) for t in curve)
    if a == 0:
        raise ValueError("leading coefficient must be nonzero")
    x0, y0 = Q(base[0]), Q(base[1])
    v = Q(v)
    if y0 * y0 != a * x0 ** 3 + b * x0 ** 2 + c * x0 + d:
        raise BasePointNotOnCurve(f"({x0}, {y0}) is not on the curve")
    A = (a * x0 - v * v + b) / a
    B = (a * x0 * x0 + v * v * x0 + b * x0 - 2 * y0 * v + c) / a
    disc = A * A - 4 * B
    return QuadPointFamily((x0, y0), v, A, B, is_square(disc))


def family_by_division(curve: Sequence, base: Sequence, v) -> tuple[Fraction, Fraction]:
    """Second route: divide the cubic in x left by the line by (x - x0)."""
    a, b, c, d = (Q(t) for t in curve)
    x0, y0 = Q(base[0]), Q(base[1])
    v = Q(v)
    # a x^3 + b x^2 + c x + d - (y0 + v (x - x0))^2
    k = y0 - v * x0
    cubic = [d - k * k, c - 2 * k * v, b - v * v, a]
    # synthetic division by (x - x0)
    q2 = cubic[3]
    q1 = cubic[2] + x0 * q2
    q0 = cubic[1] + x0 * q1
    return q1 / q2, q0 / q2


# ------------------------------------------------------- point checks

def verify_point(system: Mapping[str, str], point: Mapping[str, object]) -> bool:
    """Exact check of var^2 = expr for every equation of the system."""
    for var, rhs in system.items():
        val = point[var]
        if val * val != evaluate(rhs, point):
            return False
    return True


__all__ = [
    "HyperellipticModel", "QuadPointFamily", "Bounds", "NOT_APPLICABLE",
    "BasePointNotOnCurve", "InconsistentInput", "BadReduction", "RankNotLessThanGenus",
    "parse", "evaluate", "parse_poly", "poly_eval", "count_points_mod_p", "count_points_brute",
    "chabauty_bounds", "apply_parity", "nonobvious_count", "quad_point_family",
    "family_by_division", "verify_point", "rational_sqrt",
]
