"""Exact rationals and signs of expressions p + q*sqrt(r)."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

Rational = Fraction


def Q(x) -> Fraction:
    """Coerce ints, Fractions and "num/den" strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip().replace(" ", ""))
    raise TypeError(f"cannot coerce {x!r} to a rational")


def fmt_q(x: Fraction) -> str:
    x = Q(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def sign(x) -> int:
    return (x > 0) - (x < 0)


def rational_height(x) -> int:
    """H(a/b) = max(|a|, |b|) for a/b in lowest terms."""
    x = Q(x)
    return max(abs(x.numerator), x.denominator)


def rational_sqrt(x) -> Fraction | None:
    """Exact square root of a nonnegative rational, or None."""
    x = Q(x)
    if x < 0:
        return None
    n, d = x.numerator, x.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def is_square(x) -> bool:
    return rational_sqrt(x) is not None


def surd_sign(p, q, r) -> int:
    """Sign of p + q*sqrt(r), r >= 0, without floating point."""
    sp, sq = sign(p), sign(q)
    if sq == 0 or r == 0:
        return sp
    if sp == 0 or sp == sq:
        return sq
    # opposite signs: the larger square wins
    lhs, rhs = p * p, q * q * r
    if lhs > rhs:
        return sp
    if lhs < rhs:
        return sq
    return 0


@dataclass(frozen=True)
class Surd:
    """The real number p + q*sqrt(r) with rational p, q and r >= 0."""

    p: Fraction
    q: Fraction = Fraction(0)
    r: Fraction = Fraction(0)

    def __post_init__(self):
        p, q, r = Q(self.p), Q(self.q), Q(self.r)
        if r < 0:
            raise ValueError("negative radicand")
        if q != 0 and r != 0:
            root = rational_sqrt(r)
            if root is not None:
                p, q, r = p + q * root, Fraction(0), Fraction(0)
        if q == 0 or r == 0:
            q, r = Fraction(0), Fraction(0)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "r", r)

    @property
    def is_rational(self) -> bool:
        return self.q == 0

    def sign(self) -> int:
        return surd_sign(self.p, self.q, self.r)

    def __neg__(self) -> Surd:
        return Surd(-self.p, -self.q, self.r)

    def __abs__(self) -> Surd:
        return -self if self.sign() < 0 else self

    def _radicand_with(self, other: Surd) -> Fraction:
        if self.is_rational:
            return other.r
        if other.is_rational or other.r == self.r:
            return self.r
        raise ValueError("surds with different radicands")

    def __add__(self, other) -> Surd:
        other = as_surd(other)
        r = self._radicand_with(other)
        return Surd(self.p + other.p, self.q + other.q, r)

    __radd__ = __add__

    def __sub__(self, other) -> Surd:
        return self + (-as_surd(other))

    def __rsub__(self, other) -> Surd:
        return as_surd(other) - self

    def __mul__(self, other) -> Surd:
        other = as_surd(other)
        r = self._radicand_with(other)
        return Surd(self.p * other.p + self.q * other.q * r,
                    self.p * other.q + self.q * other.p, r)

    __rmul__ = __mul__

    def conjugate(self) -> Surd:
        return Surd(self.p, -self.q, self.r)

    def __truediv__(self, other) -> Surd:
        other = as_surd(other)
        r = self._radicand_with(other)
        den = other.p * other.p - other.q * other.q * r
        if den == 0:
            raise ZeroDivisionError("division by zero surd")
        num = self * other.conjugate()
        return Surd(num.p / den, num.q / den, r)

    def __float__(self) -> float:
        return float(self.p) + float(self.q) * math.sqrt(float(self.r))

    def __str__(self) -> str:
        if self.is_rational:
            return fmt_q(self.p)
        q = self.q
        op = "-" if q < 0 else "+"
        return f"{fmt_q(self.p)}{op}{fmt_q(abs(q))}*sqrt({fmt_q(self.r)})"

    def cmp(self, other) -> int:
        return compare_surd(self, as_surd(other))

    def __lt__(self, other):
        return self.cmp(other) < 0

    def __le__(self, other):
        return self.cmp(other) <= 0

    def __gt__(self, other):
        return self.cmp(other) > 0

    def __ge__(self, other):
        return self.cmp(other) >= 0


def as_surd(x) -> Surd:
    if isinstance(x, Surd):
        return x
    return Surd(Q(x))


def compare_surd(a: Surd, b: Surd) -> int:
    """Exact sign of a - b, also when the radicands differ."""
    a, b = as_surd(a), as_surd(b)
    if a.is_rational or b.is_rational or a.r == b.r:
        r = a.r if not a.is_rational else b.r
        return surd_sign(a.p - b.p, a.q - b.q, r)
    # u = (pa - pb) + qa*sqrt(ra) against w = qb*sqrt(rb)
    dp = a.p - b.p
    su = surd_sign(dp, a.q, a.r)
    sw = sign(b.q)
    if su != sw:
        return 1 if su > sw else -1
    if su == 0:
        return 0
    # same sign: compare squares, then restore the sign
    s2 = surd_sign(dp * dp + a.q * a.q * a.r - b.q * b.q * b.r, 2 * dp * a.q, a.r)
    return s2 * su


_SURD_RE = re.compile(
    r"^\s*(?P<p>[+-]?\d+(?:/\d+)?)?\s*"
    r"(?:(?P<sg>[+-])?\s*(?:(?P<q>\d+(?:/\d+)?)\s*\*\s*)?sqrt\((?P<r>\d+(?:/\d+)?)\))?\s*$"
)


def parse_surd(text: str) -> Surd:
    """Inverse of str(Surd): "p+q*sqrt(r)", "p" or "q*sqrt(r)"."""
    m = _SURD_RE.match(text)
    if not m or (m.group("p") is None and m.group("r") is None):
        raise ValueError(f"bad surd {text!r}")
    p = Q(m.group("p")) if m.group("p") else Fraction(0)
    if m.group("r") is None:
        return Surd(p)
    q = Q(m.group("q")) if m.group("q") else Fraction(1)
    if m.group("sg") == "-":
        q = -q
    return Surd(p, q, Q(m.group("r")))
