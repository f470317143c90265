"""Preperiodic points of f_c(z) = z^2 + c over a quadratic field."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from sympy import factorint

from .enumeration import (_exact_sort, elements_of_bounded_height,
                          iter_elements_of_bounded_height,
                          quadratic_integers_of_bounded_abs_height,
                          rationals_of_bounded_height, roots_of_monic)
from .exactnum import Q, fmt_q, rational_height
from .heights import (absolute_height_below, candidate_height_limit,
                      preper_height_bound_holds, relative_height)
from .localtests import LocalContext, signature
from .quadfield import QuadElement, QuadField, make_field, primes_above


def f(P, c):
    return P * P + c


@dataclass
class Orbit:
    points: list
    repeated: bool
    # index where the cycle starts when repeated
    cycle_start: Optional[int] = None

    @property
    def preperiod(self) -> Optional[int]:
        return self.cycle_start

    @property
    def period(self) -> Optional[int]:
        if not self.repeated:
            return None
        return len(self.points) - self.cycle_start


def orbit(P, c, max_steps: int = 100) -> Orbit:
    """P, f(P), ... until the first repeat or max_steps points."""
    seen = {}
    pts = []
    x = P
    for i in range(max_steps):
        if x in seen:
            return Orbit(pts, True, seen[x])
        seen[x] = i
        pts.append(x)
        x = f(x, c)
    if x in seen:
        return Orbit(pts, True, seen[x])
    return Orbit(pts, False)


def orbit_type(P, c, max_steps: int = 200) -> Optional[tuple[int, int]]:
    """(period, preperiod) of a preperiodic P, or None if no repeat is seen."""
    o = orbit(P, c, max_steps)
    if not o.repeated:
        return None
    return o.period, o.preperiod


@dataclass
class PreperSet:
    c: QuadElement
    K: QuadField
    points: tuple = ()
    successor: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.points)

    def __contains__(self, x):
        return x in self.successor

    def as_strings(self) -> list[str]:
        return sorted(str(p) for p in self.points)


def _as_element(c, K: QuadField) -> QuadElement:
    if isinstance(c, QuadElement):
        if c.K.D != K.D:
            if c.b != 0:
                raise ValueError(f"{c} is not in {K}")
            return QuadElement(K, c.a)
        return c
    return QuadElement(K, Q(c))


# ----------------------------------------------------------- candidates

def denominator_multiplier(ctx: LocalContext) -> int:
    """m with m*P integral for every P passing the finite tests."""
    need: dict[int, int] = {}
    for P, v in ctx.c_neg.items():
        t = -v // 2
        need[P.p] = max(need.get(P.p, 0), -(-t // P.e))
    m = 1
    for p, k in need.items():
        m *= p ** k
    return m


def _radius(s: float) -> float:
    return 0.5 + math.sqrt(0.25 + abs(s))


def box_candidates(c: QuadElement) -> list[QuadElement]:
    """Superset of the finite preperiodic points: (A + B omega)/m in an archimedean box.

    Every preperiodic P has ord(P) >= ord(c)/2 where ord(c) < 0 and ord(P) >= 0
    elsewhere, and |sigma(P)| <= 1/2 + sqrt(1/4 + |sigma(c)|) at every embedding.
    """
    K = c.K
    ctx = LocalContext(c)
    m = denominator_multiplier(ctx)
    om = K.omega
    out = []
    slack = 1e-7
    if K.is_real:
        sD = math.sqrt(K.D)
        s1, s2 = float(c.a) + float(c.b) * sD, float(c.a) - float(c.b) * sD
        R1, R2 = m * _radius(s1) + slack, m * _radius(s2) + slack
        w1 = float(om.a) + float(om.b) * sD
        w2 = float(om.a) - float(om.b) * sD
        bmax = math.floor((R1 + R2) / (w1 - w2) + slack)
        for B in range(-bmax, bmax + 1):
            lo = max(-R1 - B * w1, -R2 - B * w2)
            hi = min(R1 - B * w1, R2 - B * w2)
            for A in range(math.ceil(lo - slack), math.floor(hi + slack) + 1):
                out.append((A + B * om) / m)
    else:
        R = m * _radius(math.sqrt(float(c.norm()))) + slack
        re, im = float(om.a), float(om.b) * math.sqrt(-K.D)
        bmax = math.floor(R / im + slack)
        for B in range(-bmax, bmax + 1):
            r2 = R * R - (B * im) ** 2
            if r2 < 0:
                continue
            w = math.sqrt(r2)
            for A in range(math.ceil(-w - B * re - slack), math.floor(w - B * re + slack) + 1):
                out.append((A + B * om) / m)
    return out


def height_candidates(c: QuadElement) -> list[QuadElement]:
    """The literal candidate list: every x with H_K(x) <= phi^2 H_K(c)^(1/2)."""
    return elements_of_bounded_height(c.K, candidate_height_limit(relative_height(c)))


# ------------------------------------------------------------- worklist

def worklist(M: list, c) -> set:
    """Decide preperiodicity for the MAYBE list M (ordered by height).

    M must contain every preperiodic point; an iterate outside M is wandering.
    """
    in_m = set(M)
    done: set = set()
    Y: set = set()
    for P in M:
        if P in done:
            continue
        I = [P]
        in_i = {P}
        while True:
            Qn = f(I[-1], c)
            if Qn in Y or Qn in in_i:
                Y.update(I)
                break
            # outside M, or already shown to wander
            if Qn not in in_m or Qn in done:
                break
            I.append(Qn)
            in_i.add(Qn)
        done.update(in_i)
    return Y


def _maybe_points(ctx: LocalContext, cands: Iterable[QuadElement]) -> list[QuadElement]:
    out = []
    for P in cands:
        if ctx.test(P).is_no:
            continue
        if not preper_height_bound_holds(P, ctx.c):
            continue
        out.append(P)
    return out


def _order_by_height(pts: list[QuadElement]) -> list[QuadElement]:
    return [x for _, x in _exact_sort([(relative_height(x), x) for x in pts])]


def _preper_set(c: QuadElement, Y: set) -> PreperSet:
    pts = tuple(_order_by_height(list(Y)))
    succ = {P: f(P, c) for P in pts}
    return PreperSet(c, c.K, pts, succ)


def preperiodic_points(c, K: Optional[QuadField] = None, method: str = "box") -> PreperSet:
    """PrePer(f_c, K) without the point at infinity.

    method "box" builds candidates from denominators and archimedean radii;
    "heights" scans every element under the height bound.
    """
    if K is None:
        if not isinstance(c, QuadElement):
            raise ValueError("field required for a rational parameter")
        K = c.K
    c = _as_element(c, K)
    ctx = LocalContext(c)
    if ctx.obstruction is not None:
        return PreperSet(c, K)
    if method == "box":
        cands = box_candidates(c)
    elif method == "heights":
        cands = height_candidates(c)
    else:
        raise ValueError(f"unknown method {method!r}")
    M = _order_by_height(_maybe_points(ctx, cands))
    return _preper_set(c, worklist(M, c))


def oracle_preperiodic_points(c: QuadElement) -> set:
    """Slow check: iterate every bounded-height candidate #candidates + 1 steps.

    An orbit escapes once an iterate breaks the height bound.
    """
    cands = height_candidates(c)
    n = len(cands) + 1
    out = set()
    for P in cands:
        seen = set()
        x = P
        for _ in range(n):
            if not preper_height_bound_holds(x, c):
                break
            if x in seen:
                out.add(P)
                break
            seen.add(x)
            x = f(x, c)
    return out


# --------------------------------------------------------------- survey

@dataclass
class SurveyRecord:
    D: int
    c: QuadElement
    points: tuple
    label: str = ""
    novel: bool = False

    @property
    def count(self) -> int:
        return len(self.points)

    def to_json(self) -> dict:
        out = {
            "field": f"Q(sqrt({self.D}))",
            "c": str(self.c),
            "points": sorted(str(p) for p in self.points),
            "label": self.label,
            "count": self.count,
        }
        if self.novel:
            out["novel"] = True
        return out


@dataclass
class SurveyResult:
    records: list
    params_total: int = 0
    rejected: dict = field(default_factory=dict)
    empty: int = 0


def default_height_bound(disc_abs: int, disc_lo: int = 1, disc_hi: int = 200,
                         lo: Fraction = Fraction(1000), hi: Fraction = Fraction(2200)) -> Fraction:
    """B_K by linear interpolation in |Delta_K| (a documented schedule choice)."""
    if disc_hi <= disc_lo:
        return Fraction(lo)
    t = Fraction(min(max(disc_abs, disc_lo), disc_hi) - disc_lo, disc_hi - disc_lo)
    return Fraction(lo) + t * (Fraction(hi) - Fraction(lo))


def default_rational_height_bound(disc_abs: int, disc_lo: int = 1, disc_hi: int = 200) -> Fraction:
    """Bound on H(c) for rational c, 300 -> 600 over the same |Delta| range."""
    return default_height_bound(disc_abs, disc_lo, disc_hi, Fraction(300), Fraction(600))


_PHI4 = ((1 + math.sqrt(5)) / 2) ** 4


def _point_pool(K: QuadField, hmax: int):
    """Height-sorted pool of (float height, point), bucketed by denominator signature."""
    buckets: dict[tuple, list] = {}
    for h, P in elements_of_bounded_height(K, hmax, with_heights=True):
        buckets.setdefault(signature(P), []).append((float(h), P))
    return buckets


def _survey_params(K: QuadField, B: Fraction, rat_bound: Optional[int]):
    yield from iter_elements_of_bounded_height(K, B)
    if rat_bound:
        lim = math.isqrt(math.floor(B))
        for r in rationals_of_bounded_height(rat_bound):
            if rational_height(r) > lim:
                yield K(r)


def _survey_part(D: int, B: Fraction, rat_bound: Optional[int], part: int, nparts: int):
    K = make_field(D)
    hmax_c = max(B, Fraction(rat_bound or 0) ** 2)
    buckets = _point_pool(K, candidate_height_limit_value(hmax_c))
    found = []
    rejected: dict[str, int] = {}
    total = empty = 0
    quarter = 0.25 + 1e-9
    sD = math.sqrt(abs(D))
    for idx, c in enumerate(_survey_params(K, B, rat_bound)):
        if idx % nparts != part:
            continue
        total += 1
        # float pre-screen of the real gate; exact route decides anything close
        if D > 0 and c.b != 0:
            fa, fb = float(c.a), abs(float(c.b)) * sD
            if fa + fb > quarter:
                rejected["real-gap"] = rejected.get("real-gap", 0) + 1
                continue
        elif D > 0 and c.a > Fraction(1, 4):
            rejected["real-gap"] = rejected.get("real-gap", 0) + 1
            continue
        ctx = LocalContext(c)
        if ctx.obstruction is not None:
            rejected[ctx.obstruction] = rejected.get(ctx.obstruction, 0) + 1
            continue
        bucket = buckets.get(ctx.required, ())
        # float screen of H_K(P)^2 <= phi^4 H_K(c); the exact test settles the margin
        lim = _PHI4 * float(relative_height(c))
        M = []
        for h, P in bucket:
            h2 = h * h
            if h2 > lim * (1 + 1e-9):
                break
            if ctx.archimedean_verdict(P) is None and (
                    h2 < lim * (1 - 1e-9) or preper_height_bound_holds(P, c)):
                M.append(P)
        Y = worklist(M, c) if M else set()
        if not Y:
            empty += 1
            continue
        found.append((c.a, c.b, tuple(str(p) for p in _order_by_height(list(Y)))))
    return found, total, rejected, empty


def candidate_height_limit_value(hc) -> int:
    from .exactnum import Surd
    return candidate_height_limit(Surd(Q(hc)))


def survey(K: QuadField, B, include_rational_c_up_to=None, workers: int = 1,
           label: bool = True) -> SurveyResult:
    """PrePer(f_c, K) for every c with H_K(c) <= B, plus rational c with H(c) <= the second bound."""
    B = Q(B)
    rat = None if include_rational_c_up_to is None else math.floor(Q(include_rational_c_up_to))
    if workers <= 1:
        parts = [_survey_part(K.D, B, rat, 0, 1)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            futs = [ex.submit(_survey_part, K.D, B, rat, i, workers) for i in range(workers)]
            parts = [fu.result() for fu in futs]
    result = SurveyResult([])
    rows = []
    for found, total, rejected, empty in parts:
        rows.extend(found)
        result.params_total += total
        result.empty += empty
        for k, v in rejected.items():
            result.rejected[k] = result.rejected.get(k, 0) + v
    from .quadfield import parse_element
    recs = []
    for a, b, pts in rows:
        c = QuadElement(K, a, b)
        points = tuple(parse_element(s, K) for s in pts)
        recs.append((relative_height(c), c, points))
    recs.sort(key=lambda t: (float(t[0]), t[1].a, t[1].b))
    if label:
        from .portraits import label_points
    for _, c, points in recs:
        rec = SurveyRecord(K.D, c, points)
        if label:
            lab = label_points(points, c)
            rec.label, rec.novel = lab.text, lab.novel
        result.records.append(rec)
    return result


# ------------------------------------------------------------ section 5

PCF_HEIGHT_CUTOFF = Fraction(229, 100)


def classify_pcf_parameters(max_iter: int = 5) -> set:
    """PCF parameters c of degree <= 2: algebraic integers with H(c) <= 2 whose
    critical orbit keeps H(f^n(0)) < 2.29 for n <= max_iter and is finite."""
    cands = [Fraction(n) for n in range(-2, 3)]
    for a1, a0 in quadratic_integers_of_bounded_abs_height(2):
        cands.extend(roots_of_monic(a1, a0))
    out = set()
    for c in cands:
        x = c * 0 if isinstance(c, QuadElement) else Fraction(0)
        ok = True
        for _ in range(max_iter):
            x = f(x, c)
            if isinstance(x, QuadElement):
                small = absolute_height_below(x, PCF_HEIGHT_CUTOFF)
            else:
                small = rational_height(x) < PCF_HEIGHT_CUTOFF
            if not small:
                ok = False
                break
        if ok and orbit(c * 0, c, 50).repeated:
            out.add(c)
    return out


UNIQUE_FIXED_POINT_C = Fraction(1, 4)


def unique_fixed_point_portraits(other_fields: Iterable[int] = (7, 5, 2, -2, -7, 3)) -> dict:
    """c = 1/4 is the only parameter with one fixed point; its portrait by field."""
    from .portraits import label_points
    out = {}
    for key, D in (("Q(sqrt(-1))", -1), ("Q(sqrt(-3))", -3)):
        S = preperiodic_points(UNIQUE_FIXED_POINT_C, make_field(D))
        out[key] = label_points(S.points, S.c).text
    others = set()
    for D in other_fields:
        S = preperiodic_points(UNIQUE_FIXED_POINT_C, make_field(D))
        others.add(label_points(S.points, S.c).text)
    if len(others) != 1:
        raise AssertionError(f"portraits over other fields disagree: {others}")
    out["otherwise"] = others.pop()
    return out


def fixed_points_count(c: QuadElement) -> int:
    """Number of distinct finite fixed points in K (roots of z^2 - z + c)."""
    disc = 1 - 4 * c
    if disc == 0:
        return 1
    from .quadfield import sqrt_in_field
    return 2 if sqrt_in_field(disc) is not None else 0
