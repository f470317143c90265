"""Filled Julia set obstructions: parameter gate and per-point NO/MAYBE tests."""
from __future__ import annotations

from dataclasses import dataclass
import math
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .exactnum import Surd, compare_surd, surd_sign
from .quadfield import (PrimeIdeal, QuadElement, is_square_in_completion,
                        negative_valuations)

NO = "NO"
MAYBE = "MAYBE"

ARCHIMEDEAN_ESCAPE = "archimedean-escape"
REAL_GAP = "real-gap"
FINITE_DENOMINATOR = "finite-denominator"
VALUATION_MISMATCH = "valuation-mismatch"

QUARTER = Fraction(1, 4)


@dataclass(frozen=True)
class TestVerdict:
    value: str
    reason: Optional[str] = None

    def __post_init__(self):
        if self.value == NO and self.reason is None:
            raise ValueError("NO verdict needs a reason")

    @property
    def is_no(self) -> bool:
        return self.value == NO

    def __str__(self):
        return self.value if self.reason is None else f"{self.value} ({self.reason})"


VERDICT_MAYBE = TestVerdict(MAYBE)


def signature(x: QuadElement) -> tuple:
    """Sorted ((p, root), ord) over primes where x has negative valuation."""
    return tuple(sorted((P.key(), v) for P, v in negative_valuations(x).items()))


def _real_embeddings(x: QuadElement) -> list[Surd]:
    if x.b == 0:
        return [Surd(x.a)]
    return [x.embed(1), x.embed(-1)]


def _unit_for_square_test(c: QuadElement, P: PrimeIdeal, v: int) -> QuadElement:
    """-c times an even power of a uniformizer, making it a P-unit (v = ord(c) even)."""
    t = -v // 2
    if P.kind == "ramified":
        pi2 = c.K(P.K.D) if P.K.D % P.p == 0 else None
        if pi2 is None:
            raise AssertionError("ramified odd prime must divide D")
        return -c * pi2 ** t
    return -c * Fraction(P.p) ** (2 * t)


def _parameter_obstruction(c: QuadElement) -> Optional[str]:
    if c.K.is_real:
        for s in _real_embeddings(c):
            if compare_surd(s, Surd(QUARTER)) > 0:
                return REAL_GAP
    for P, v in negative_valuations(c).items():
        if v % 2:
            return VALUATION_MISMATCH
        if P.p != 2:
            u = _unit_for_square_test(c, P, v)
            if not is_square_in_completion(u, P):
                return VALUATION_MISMATCH
    return None


def parameter_admissible(c: QuadElement) -> bool:
    """False when f_c provably has no finite K-rational preperiodic point."""
    return _parameter_obstruction(c) is None


# float margins inside this relative tolerance fall back to exact arithmetic
_TOL = 1e-12


def _decided(margin: float, tol: float) -> bool:
    return abs(margin) > tol


def _escapes_real(x: Surd, s: Surd) -> bool:
    """|x| > 1/2 + sqrt(1/4 + |s|) via |x|^2 - |x| - |s| > 0 and |x| > 1/2."""
    ax = abs(x)
    if compare_surd(ax, Surd(Fraction(1, 2))) <= 0:
        return False
    return (ax * ax - ax - abs(s)).sign() > 0


def _outside_real_interval(x: Surd, s: Surd) -> bool:
    """|x| > a with a = 1/2 + sqrt(1/4 - s), s <= 1/4: x^2 - |x| + s > 0 and |x| > 1/2."""
    ax = abs(x)
    if compare_surd(ax, Surd(Fraction(1, 2))) <= 0:
        return False
    return (ax * ax - ax + s).sign() > 0


def _in_inner_gap(x: Surd, s: Surd) -> bool:
    """For s < -2: x^2 + s < -a, i.e. w = x^2 + s + 1/2 < 0 and w^2 > 1/4 - s."""
    w = x * x + s + Fraction(1, 2)
    if w.sign() >= 0:
        return False
    return (w * w - (QUARTER - s)).sign() > 0


def _escapes_complex(n: Fraction, s: Fraction) -> bool:
    """sqrt(n) - 1/2 > sqrt(1/4 + sqrt(s)) for n = N(P), s = N(c), exactly.

    Equivalent to sqrt(n) > 1/2 and n - sqrt(n) - sqrt(s) > 0.
    """
    if n <= QUARTER:
        return False
    u = Surd(n, Fraction(-1), n)  # n - sqrt(n)
    if u.sign() <= 0:
        return False
    return compare_surd(u * u, Surd(s)) > 0


class LocalContext:
    """Per-parameter data reused across many points."""

    def __init__(self, c: QuadElement):
        self.c = c
        self.K = c.K
        self.obstruction = _parameter_obstruction(c)
        self.c_neg = negative_valuations(c)
        self.required = tuple(sorted((P.key(), v // 2) for P, v in self.c_neg.items()))
        self.c_keys = {P.key() for P in self.c_neg}
        if self.K.is_real:
            self.c_real = _real_embeddings(c)
            if c.b == 0:
                self.c_real = self.c_real * 2
            self.c_float = [float(s) for s in self.c_real]
            self.c_mag = abs(float(c.a)) + abs(float(c.b)) * math.sqrt(abs(self.K.D))
        else:
            self.c_norm = c.norm()
            self.c_norm_f = float(self.c_norm)

    def valuation_verdict(self, sig: tuple) -> Optional[str]:
        """Tests on finite places, given the signature of P."""
        if sig == self.required:
            return None
        for key, _ in sig:
            if key not in self.c_keys:
                return FINITE_DENOMINATOR
        return VALUATION_MISMATCH

    def archimedean_verdict(self, P: QuadElement) -> Optional[str]:
        """Float margins decide clear cases; anything within tolerance goes exact."""
        if not self.K.is_real:
            n = float(P.norm())
            m = math.sqrt(n) - 0.5 - math.sqrt(0.25 + math.sqrt(self.c_norm_f)) if n > 0.25 else -1.0
            if _decided(m, _TOL * (1 + n + self.c_norm_f)):
                return ARCHIMEDEAN_ESCAPE if m > 0 else None
            return ARCHIMEDEAN_ESCAPE if _escapes_complex(P.norm(), self.c_norm) else None
        xs = None
        rD = math.sqrt(self.K.D)
        a, b = float(P.a), float(P.b)
        xf = [a + b * rD, a - b * rD] if P.b != 0 else [a, a]
        # float errors scale with the size of the coefficients involved
        scale = 1 + abs(a) + abs(b) * rD + self.c_mag
        tol1, tol2, tol4 = _TOL * scale, _TOL * scale ** 2, _TOL * scale ** 4

        def exact():
            nonlocal xs
            if xs is None:
                xs = _real_embeddings(P)
                if P.b == 0:
                    xs = xs * 2
            return xs

        for i, (x, s) in enumerate(zip(xf, self.c_float)):
            ax = abs(x)
            m0, m = ax - 0.5, ax * ax - ax - abs(s)
            if _decided(m0, tol1) and (m0 < 0 or _decided(m, tol2)):
                if m0 > 0 and m > 0:
                    return ARCHIMEDEAN_ESCAPE
            elif _escapes_real(exact()[i], self.c_real[i]):
                return ARCHIMEDEAN_ESCAPE
        for i, (x, s) in enumerate(zip(xf, self.c_float)):
            ax = abs(x)
            m0, m = ax - 0.5, ax * ax - ax + s
            if _decided(m0, tol1) and (m0 < 0 or _decided(m, tol2)):
                if m0 > 0 and m > 0:
                    return REAL_GAP
            elif _outside_real_interval(exact()[i], self.c_real[i]):
                return REAL_GAP
            if _decided(s + 2, tol1):
                if s > -2:
                    continue
                w = x * x + s + 0.5
                v = w * w - (0.25 - s)
                if _decided(w, tol2) and (w > 0 or _decided(v, tol4)):
                    if w < 0 and v > 0:
                        return REAL_GAP
                    continue
            if compare_surd(self.c_real[i], Surd(-2)) < 0 and _in_inner_gap(exact()[i], self.c_real[i]):
                return REAL_GAP
        return None

    def test(self, P: QuadElement, sig: Optional[tuple] = None) -> TestVerdict:
        if self.obstruction is not None:
            return TestVerdict(NO, self.obstruction)
        if sig is None:
            sig = signature(P)
        reason = self.valuation_verdict(sig)
        if reason is None:
            reason = self.archimedean_verdict(P)
        if reason is None:
            return VERDICT_MAYBE
        return TestVerdict(NO, reason)


@lru_cache(maxsize=2048)
def _context(D: int, a: Fraction, b: Fraction) -> LocalContext:
    from .quadfield import _field
    return LocalContext(QuadElement(_field(D), a, b))


def context_for(c: QuadElement) -> LocalContext:
    return _context(c.K.D, c.a, c.b)


def preperiodicity_test(P: QuadElement, c: QuadElement) -> TestVerdict:
    """NO when P is provably not preperiodic for z^2 + c, else MAYBE."""
    if P.K.D != c.K.D:
        raise ValueError("P and c lie in different fields")
    return context_for(c).test(P)


__all__ = [
    "NO", "MAYBE", "TestVerdict", "LocalContext", "signature",
    "parameter_admissible", "preperiodicity_test", "context_for",
    "ARCHIMEDEAN_ESCAPE", "REAL_GAP", "FINITE_DENOMINATOR", "VALUATION_MISMATCH",
]
