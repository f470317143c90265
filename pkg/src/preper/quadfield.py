"""Quadratic fields Q(sqrt(D)): elements, embeddings, primes and valuations."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from sympy import factorint, isprime, jacobi_symbol

from .exactnum import Q, Surd, fmt_q, rational_sqrt, surd_sign


class PerfectSquareInput(ValueError):
    pass


class ZeroInput(ValueError):
    pass


class EvenResidueCharacteristic(ValueError):
    pass


def squarefree_kernel(n) -> int:
    """Squarefree integer D with Q(sqrt(n)) = Q(sqrt(D)); n a nonzero rational."""
    n = Q(n)
    if n == 0:
        raise ZeroInput("zero has no squarefree kernel")
    m = n.numerator * n.denominator
    s = -1 if m < 0 else 1
    out = 1
    for p, e in factorint(abs(m)).items():
        if e % 2:
            out *= p
    return s * out


def valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def qvaluation(x: Fraction, p: int) -> int:
    return valuation(x.numerator, p) - valuation(x.denominator, p)


@dataclass(frozen=True)
class QuadField:
    """Q(sqrt(D)) for squarefree D != 0, 1."""

    D: int

    @property
    def disc(self) -> int:
        return self.D if self.D % 4 == 1 else 4 * self.D

    @property
    def is_real(self) -> bool:
        return self.D > 0

    @property
    def omega(self) -> QuadElement:
        if self.D % 4 == 1:
            return QuadElement(self, Fraction(1, 2), Fraction(1, 2))
        return QuadElement(self, Fraction(0), Fraction(1))

    @property
    def omega_poly(self) -> tuple[int, int]:
        """(t1, t0) with omega**2 = t1*omega + t0."""
        if self.D % 4 == 1:
            return 1, (self.D - 1) // 4
        return 0, self.D

    def __call__(self, a=0, b=0) -> QuadElement:
        return QuadElement(self, Q(a), Q(b))

    def sqrtD(self) -> QuadElement:
        return QuadElement(self, Fraction(0), Fraction(1))

    def __str__(self) -> str:
        return f"Q(sqrt({self.D}))"


def make_field(d) -> QuadField:
    d = Q(d)
    if d == 0 or rational_sqrt(d) is not None:
        raise PerfectSquareInput(f"{fmt_q(d)} is a square; no quadratic field")
    return _field(squarefree_kernel(d))


@lru_cache(maxsize=None)
def _field(D: int) -> QuadField:
    return QuadField(D)


def parse_field(text: str) -> QuadField:
    m = re.fullmatch(r"\s*Q\(sqrt\((-?\d+)\)\)\s*", text)
    if m:
        return make_field(int(m.group(1)))
    return make_field(int(text))


class QuadElement:
    """a + b*sqrt(D) with rational a, b."""

    __slots__ = ("K", "a", "b", "_hash")

    def __init__(self, K: QuadField, a, b=Fraction(0)):
        self.K = K
        self.a = a if isinstance(a, Fraction) else Q(a)
        self.b = b if isinstance(b, Fraction) else Q(b)
        self._hash = None

    # arithmetic
    def _lift(self, other) -> QuadElement:
        if isinstance(other, QuadElement):
            if other.K.D != self.K.D:
                raise ValueError("elements of different fields")
            return other
        return QuadElement(self.K, Q(other), Fraction(0))

    def __add__(self, other):
        o = self._lift(other)
        return QuadElement(self.K, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        return QuadElement(self.K, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        return QuadElement(self.K, -self.a, -self.b)

    def __mul__(self, other):
        if not isinstance(other, QuadElement):
            o = Q(other)
            return QuadElement(self.K, self.a * o, self.b * o)
        o = self._lift(other)
        a, b, c, d = self.a, self.b, o.a, o.b
        return QuadElement(self.K, a * c + self.K.D * b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self) -> QuadElement:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return QuadElement(self.K, self.a / n, -self.b / n)

    def __truediv__(self, other):
        if not isinstance(other, QuadElement):
            o = Q(other)
            return QuadElement(self.K, self.a / o, self.b / o)
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = QuadElement(self.K, Fraction(1), Fraction(0))
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def square(self) -> QuadElement:
        a, b = self.a, self.b
        return QuadElement(self.K, a * a + self.K.D * b * b, 2 * a * b)

    def __eq__(self, other):
        if isinstance(other, QuadElement):
            return self.K.D == other.K.D and self.a == other.a and self.b == other.b
        try:
            o = Q(other)
        except TypeError:
            return NotImplemented
        return self.b == 0 and self.a == o

    def __hash__(self):
        # elements are never mutated, so the hash is computed once
        h = self._hash
        if h is None:
            h = hash(self.a) if self.b == 0 else hash((self.a, self.b, self.K.D))
            self._hash = h
        return h

    def __bool__(self):
        return self.a != 0 or self.b != 0

    # field data
    def conj(self) -> QuadElement:
        return QuadElement(self.K, self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - self.K.D * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def embed(self, which: int) -> Surd:
        """Real embedding sigma_which (which = +1 or -1) of a real field."""
        if not self.K.is_real:
            raise ValueError("imaginary field has no real embeddings")
        return Surd(self.a, which * self.b, self.K.D)

    def real_sign(self, which: int) -> int:
        return surd_sign(self.a, which * self.b, self.K.D)

    def to_complex(self) -> complex:
        D = self.K.D
        if D > 0:
            return complex(float(self.a) + float(self.b) * math.sqrt(D))
        return complex(float(self.a), float(self.b) * math.sqrt(-D))

    def embeddings_float(self) -> list[complex]:
        """Values under both complex embeddings."""
        x, y = self.to_complex(), self.conj().to_complex()
        return [x, y]

    def basis_coords(self) -> tuple[int, int, int]:
        """(A, B, m) with self = (A + B*omega)/m, m > 0 minimal."""
        if self.K.D % 4 == 1:
            u, v = self.a - self.b, 2 * self.b
        else:
            u, v = self.a, self.b
        m = u.denominator * v.denominator // math.gcd(u.denominator, v.denominator)
        return int(u * m), int(v * m), m

    def is_integral(self) -> bool:
        return self.basis_coords()[2] == 1

    def __repr__(self):
        return f"QuadElement({self})"

    def __str__(self):
        return format_element(self)


def format_element(x: QuadElement) -> str:
    if x.b == 0:
        return fmt_q(x.a)
    op = "-" if x.b < 0 else "+"
    head = fmt_q(x.a) if x.a else ("-" if x.b < 0 else "")
    if not x.a:
        op = ""
    return f"{head}{op}{fmt_q(abs(x.b))}*sqrt({x.K.D})"


_ELT_RE = re.compile(
    # the rational part must end at a sign or at the end of the string
    r"^(?:(?P<p>[+-]?\d+(?:/\d+)?)(?=[+-]|$))?"
    r"(?:(?P<sg>[+-])?(?:(?P<q>\d+(?:/\d+)?)\*?)?sqrt\((?P<r>-?\d+)\))?$"
)


def parse_element(text: str, K: QuadField | None = None) -> QuadElement:
    """Parse "a+b*sqrt(D)"; D may be omitted for rationals when K is given."""
    s = text.replace(" ", "")
    m = _ELT_RE.match(s)
    if not m or (m.group("p") is None and m.group("r") is None):
        raise ValueError(f"bad element {text!r}")
    a = Q(m.group("p")) if m.group("p") else Fraction(0)
    if m.group("r") is None:
        if K is None:
            raise ValueError("field required for a rational element")
        return QuadElement(K, a)
    L = make_field(int(m.group("r")))
    if K is not None and K.D != L.D:
        raise ValueError(f"{text!r} is not in {K}")
    b = Q(m.group("q")) if m.group("q") else Fraction(1)
    if m.group("sg") == "-":
        b = -b
    # sqrt(n) with n not squarefree: rescale
    n = int(m.group("r"))
    scale = rational_sqrt(Fraction(n, L.D))
    return QuadElement(L, a, b * scale)


# --------------------------------------------------------------- primes

@dataclass(frozen=True)
class PrimeIdeal:
    """A prime of O_K over p. For split and ramified p, root is omega mod p."""

    D: int
    p: int
    kind: str  # "split" | "inert" | "ramified"
    root: int | None = None

    @property
    def K(self) -> QuadField:
        return _field(self.D)

    @property
    def e(self) -> int:
        return 2 if self.kind == "ramified" else 1

    @property
    def f(self) -> int:
        return 2 if self.kind == "inert" else 1

    @property
    def residue_field_size(self) -> int:
        return self.p ** self.f

    def key(self) -> tuple[int, int]:
        return (self.p, -1 if self.root is None else self.root)

    def hensel_root(self, k: int) -> int:
        """omega mod p**k in the completion at this (split) prime."""
        return _hensel(self.D, self.p, self.root, k)

    def __str__(self):
        if self.root is None:
            return f"({self.p})"
        return f"({self.p}, w-{self.root})"


def split_kind(K: QuadField, p: int) -> str:
    disc = K.disc
    if disc % p == 0:
        return "ramified"
    if p == 2:
        return "split" if disc % 8 == 1 else "inert"
    return "split" if jacobi_symbol(disc % p, p) == 1 else "inert"


def _omega_roots_mod_p(K: QuadField, p: int) -> list[int]:
    t1, t0 = K.omega_poly
    return [r for r in range(p) if (r * r - t1 * r - t0) % p == 0]


@lru_cache(maxsize=None)
def primes_above(K: QuadField, p: int) -> tuple[PrimeIdeal, ...]:
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    kind = split_kind(K, p)
    if kind == "inert":
        return (PrimeIdeal(K.D, p, kind),)
    if kind == "ramified":
        (r,) = set(_omega_roots_mod_p(K, p))
        return (PrimeIdeal(K.D, p, kind, r),)
    roots = _omega_roots_mod_p(K, p)
    return tuple(PrimeIdeal(K.D, p, kind, r) for r in roots)


def splitting_type(K: QuadField, p: int) -> tuple[PrimeIdeal, ...]:
    """The primes of O_K above p; their common kind tells the splitting."""
    return primes_above(K, p)


@lru_cache(maxsize=4096)
def _hensel(D: int, p: int, r0: int, k: int) -> int:
    K = _field(D)
    t1, t0 = K.omega_poly
    r, mod = r0, p
    while mod < p ** k:
        mod = min(mod * mod, p ** k)
        fr = r * r - t1 * r - t0
        dfr = 2 * r - t1
        r = (r - fr * pow(dfr, -1, mod)) % mod
    return r % (p ** k)


def _int_ord(A: int, B: int, P: PrimeIdeal) -> int:
    """ord_P of the nonzero integral element A + B*omega."""
    p = P.p
    if P.kind == "inert":
        return min(valuation(A, p) if A else 10**9, valuation(B, p) if B else 10**9)
    if P.kind == "ramified":
        t = min(valuation(A, p) if A else 10**9, valuation(B, p) if B else 10**9)
        A1, B1 = A // p ** t, B // p ** t
        t1, t0 = P.K.omega_poly
        n = A1 * A1 + t1 * A1 * B1 - t0 * B1 * B1
        return 2 * t + (1 if n % p == 0 else 0)
    # split: ord = v_p(A + B*rho) in Z_p, bounded by v_p of the norm
    t1, t0 = P.K.omega_poly
    n = A * A + t1 * A * B - t0 * B * B
    k = valuation(n, p) + 1
    r = P.hensel_root(k)
    v = (A + B * r) % (p ** k)
    return valuation(v, p) if v else k


def ord_ideal(x: QuadElement, P: PrimeIdeal) -> int:
    """Exact valuation of x at P (uniformizer normalization, so ord(p) = e)."""
    if not x:
        raise ZeroInput("ord of zero")
    A, B, m = x.basis_coords()
    return _int_ord(A, B, P) - P.e * valuation(m, P.p)


def denominator_primes(x: QuadElement) -> list[int]:
    """Rational primes p that can carry a negative valuation of x."""
    m = x.basis_coords()[2]
    return sorted(factorint(m)) if m > 1 else []


def negative_valuations(x: QuadElement) -> dict[PrimeIdeal, int]:
    out = {}
    if not x:
        return out
    for p in denominator_primes(x):
        for P in primes_above(x.K, p):
            v = ord_ideal(x, P)
            if v < 0:
                out[P] = v
    return out


def uniformizer(P: PrimeIdeal) -> QuadElement:
    K = P.K
    if P.kind != "ramified":
        return K(P.p)
    for cand in (K.sqrtD(), K(1, 1), K.omega, K.omega - 1):
        if valuation(int(cand.norm() * cand.basis_coords()[2] ** 2), P.p) == 1 and cand.is_integral():
            return cand
    raise AssertionError("no uniformizer found")


def unit_part(x: QuadElement, P: PrimeIdeal) -> QuadElement:
    """x / pi**ord(x); the uniformizer is p itself unless P is ramified."""
    v = ord_ideal(x, P)
    return x / (uniformizer(P) ** v)


def residue(x: QuadElement, P: PrimeIdeal):
    """Image of a P-unit in the residue field: int mod p, or (u, v) = u + v*omega mod p."""
    if ord_ideal(x, P) != 0:
        raise ValueError("residue of a non-unit")
    p = P.p
    A, B, m = x.basis_coords()
    if P.kind == "split":
        t = valuation(m, p)
        k = t + 1
        r = P.hensel_root(k)
        num = (A + B * r) % p ** k
        return (num // p ** t) * pow(m // p ** t, -1, p) % p
    t = valuation(m, p)
    if P.kind == "ramified":
        # A + B*omega lies in p**t O_K since the element is a unit
        A1, B1 = A // p ** t, B // p ** t
        return (A1 + B1 * P.root) * pow(m // p ** t, -1, p) % p
    A1, B1 = A // p ** t, B // p ** t
    inv = pow(m // p ** t, -1, p)
    return (A1 * inv % p, B1 * inv % p)


def is_square_in_completion(u: QuadElement, P: PrimeIdeal) -> bool:
    """Square test for a P-unit at an odd prime (residue field plus Hensel)."""
    if P.p == 2:
        raise EvenResidueCharacteristic("square test needs odd residue characteristic")
    p = P.p
    res = residue(u, P)
    if P.kind != "inert":
        return jacobi_symbol(res, p) == 1
    # in F_{p^2}, u is a square iff its norm to F_p is
    a, b = res
    t1, t0 = P.K.omega_poly
    n = (a * a + t1 * a * b - t0 * b * b) % p
    return jacobi_symbol(n, p) == 1


def sqrt_in_field(x: QuadElement) -> QuadElement | None:
    """A square root of x inside its field, or None."""
    K = x.K
    if x.b == 0:
        r = rational_sqrt(x.a)
        if r is not None:
            return K(r)
        r = rational_sqrt(x.a / K.D)
        return QuadElement(K, Fraction(0), r) if r is not None else None
    # (p + q sqrt(D))^2 = a + b sqrt(D): p^2 + D q^2 = a, 2 p q = b
    n = rational_sqrt(x.norm())
    if n is None:
        return None
    for s in (n, -n):
        p = rational_sqrt((x.a + s) / 2)
        if p:
            return QuadElement(K, p, x.b / (2 * p))
    return None
