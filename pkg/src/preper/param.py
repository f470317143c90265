"""Parameterizations: closed-form cycles and per-portrait instance generators."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from .curves import evaluate
from .exactnum import Q, rational_sqrt
from .quadfield import QuadElement, QuadField, format_element, make_field, sqrt_in_field


class DegenerateParameter(ValueError):
    pass


class NotOnCurve(ValueError):
    pass


class SquareDiscriminant(ValueError):
    pass


class InconsistentFields(ValueError):
    pass


class VerificationFailed(AssertionError):
    pass


def _num(x):
    return x if isinstance(x, QuadElement) else Q(x)


# ------------------------------------------------------------ cycles

def fixed_point_pair(x):
    """Both fixed points of z^2 + c with c = 1/4 - x^2."""
    x = _num(x)
    half = Fraction(1, 2)
    return x + half, half - x, Fraction(1, 4) - x * x


def two_cycle(x):
    """A 2-cycle (p, f(p)) of z^2 + c with c = -3/4 - x^2, x nonzero."""
    x = _num(x)
    if x == 0:
        raise DegenerateParameter("x = 0 collapses the 2-cycle")
    half = Fraction(1, 2)
    return x - half, -x - half, Fraction(-3, 4) - x * x


def three_cycle(x):
    """A 3-cycle (p, f(p), f^2(p)) and c, for x(x+1)(x^2+x+1) nonzero."""
    x = _num(x)
    if x * (x + 1) * (x * x + x + 1) == 0:
        raise DegenerateParameter("x is on the excluded locus x(x+1)(x^2+x+1) = 0")
    den = 2 * x * (x + 1)
    p0 = (x ** 3 + 2 * x * x + x + 1) / den
    p1 = (x ** 3 - x - 1) / den
    p2 = -(x ** 3 + 2 * x * x + 3 * x + 1) / den
    c = -(x ** 6 + 2 * x ** 5 + 4 * x ** 4 + 8 * x ** 3 + 9 * x * x + 4 * x + 1) / (den * den)
    return p0, p1, p2, c


def F16(x):
    return -x * (x * x + 1) * (x * x - 2 * x - 1)


def four_cycle(x, y):
    """A 4-cycle of z^2 + c from a point (x, y) on y^2 = F16(x) with y(x^2 - 1) nonzero."""
    x, y = _num(x), _num(y)
    if y * y != F16(x):
        raise NotOnCurve(f"y^2 != F16(x) at x = {x}")
    if y * (x * x - 1) == 0:
        raise DegenerateParameter("y(x^2 - 1) = 0")
    u = (x - 1) / (2 * (x + 1))
    v = -(x + 1) / (2 * (x - 1))
    w0 = y / (2 * x * (x - 1))
    w1 = y / (2 * x * (x + 1))
    orbit = (u + w0, v + w1, u - w0, v - w1)
    c = ((x * x - 4 * x - 1) * (x ** 4 + x ** 3 + 2 * x * x - x + 1)
         / (4 * x * (x - 1) ** 2 * (x + 1) ** 2))
    return orbit, c


# ------------------------------------------------------ family table

C_A = "-2*(x^2+1)/(x^2-1)^2"
C_B = "-(x^4+2*x^3+2*x^2-2*x+1)/(x^2-1)^2"
C_C = "-(3*x^4+10*x^2+3)/(4*(x^2-1)^2)"
C_3 = "-(x^6+2*x^5+4*x^4+8*x^3+9*x^2+4*x+1)/(4*x^2*(x+1)^2)"
C_4 = "(x^2-4*x-1)*(x^4+x^3+2*x^2-x+1)/(4*x*(x^2-1)^2)"
F_16 = "-x*(x^2+1)*(x^2-2*x-1)"
F_18 = "x^6+2*x^5+5*x^4+10*x^3+10*x^2+4*x+1"
F_13 = "x^6+2*x^5+x^4+2*x^3+6*x^2+4*x+1"
CUBIC = "2*(x^3+x^2-x+1)"
QUARTIC = "2*(x^4+2*x^3-2*x+1)"
SEXTIC_32 = "x^6-2*x^4+2*x^3+5*x^2+2*x+1"
P4 = "(x-1)/(2*(x+1)) + y/(2*x*(x-1))"


@dataclass(frozen=True)
class ParamFamily:
    """One parameterized portrait type.

    equations: ordered (var, rhs) square conditions var^2 = rhs.
    points: (name, formula, (period, preperiod)).
    relations: (kind, (name, n), (name', n')) with kind "eq" or "ne" on iterates.
    inverse: ordered (var, formula) recovering x, y, z from the points; f<n>_<name>
    denotes the n-th iterate of a point.
    symmetries: substitutions x -> s(x) leaving c unchanged.
    """

    tag: str
    equations: tuple
    c: str
    points: tuple
    excluded: str
    inverse: tuple
    relations: tuple = ()
    symmetries: tuple = ()

    @property
    def variables(self) -> tuple:
        return tuple(v for v, _ in self.equations)


FAMILIES = {fam.tag: fam for fam in (
    ParamFamily(
        "8(1,1)a", (("y", "-(x^2-3)*(x^2+1)"),), C_A,
        (("a", "-2*x/(x^2-1)", (1, 2)), ("b", "y/(x^2-1)", (1, 2))),
        "(x^4-1)*(x^2+3)",
        (("x", "-a/(a^2+c)"), ("y", "2*b/(a^2+c)")),
        (("ne", ("a", 2), ("b", 2)),), ("-x",)),
    ParamFamily(
        "8(1,1)b", (("y", CUBIC),), C_A,
        (("p", "y/(x^2-1)", (1, 3)),),
        "x^2-1",
        (("x", "f1_p/f2_p"), ("y", "p*(x^2-1)")),
        (), ("-x",)),
    ParamFamily(
        "8(2)a", (("y", QUARTIC),), C_B,
        (("a", "-(x^2+1)/(x^2-1)", (2, 2)), ("b", "y/(x^2-1)", (2, 2))),
        "x*(x^2-1)*(x^2+4*x-1)*(x^2+2*x-1)",
        (("x", "(a-1)/(a^2+c)"), ("y", "b*(x^2-1)")),
        (("ne", ("a", 2), ("b", 2)),), ("-1/x",)),
    ParamFamily(
        "8(2)b", (("y", CUBIC),), C_B,
        (("p", "y/(x^2-1)", (2, 3)),),
        "x*(x^2-1)*(x^2+4*x-1)",
        (("x", "(f1_p-1)/f2_p"), ("y", "p*(x^2-1)")),
        (), ("-1/x",)),
    ParamFamily(
        "8(4)", (("y", F_16),), C_4,
        (("p", P4, (4, 0)),),
        "y*(x^2-1)",
        (("x", "(1+f2_p+p)/(1-f2_p-p)"), ("y", "(2*p*x*(x^2-1)-x*(x-1)^2)/(x+1)")),
        (), ("-1/x",)),
    ParamFamily(
        "10(1,1)a", (("y", CUBIC), ("z", "-2*(x^3-x^2-x-1)")), C_A,
        (("a", "y/(x^2-1)", (1, 3)), ("b", "z/(x^2-1)", (1, 3))),
        "x*(x^2-1)",
        (("x", "f1_a/f2_a"), ("y", "a*(x^2-1)"), ("z", "b*(x^2-1)")),
        (("eq", ("a", 2), ("b", 2)), ("ne", ("a", 1), ("b", 1))), ("-x",)),
    ParamFamily(
        "10(2,1,1)a", (("y", "5*x^4-8*x^3+6*x^2+8*x+5"),), C_C,
        (("a", "(3*x^2+1)/(2*(x^2-1))", (1, 0)), ("b", "y/(2*(x^2-1))", (2, 2))),
        "x*(x^2-1)*(x^2-4*x-1)",
        (("x", "(1+2*f2_b)/(3-2*a)"), ("y", "2*b*(x^2-1)")),
        (), ("-x", "1/x", "-1/x")),
    ParamFamily(
        "10(2,1,1)b", (("y", "(5*x^2-1)*(x^2+3)"),), C_C,
        (("a", "y/(2*(x^2-1))", (1, 2)), ("b", "-(x^2-4*x-1)/(2*(x^2-1))", (2, 0))),
        "x*(x^2-1)*(x^2+3)",
        (("x", "-(1+2*f2_b)/(1+2*f2_a)"), ("y", "2*a*(x^2-1)")),
        (), ("-x", "1/x", "-1/x")),
    ParamFamily(
        "10(3,1,1)", (("y", F_18),), C_3,
        (("a", "(x^3+2*x^2+x+1)/(2*x*(x+1))", (3, 0)), ("b", "1/2+y/(2*x*(x+1))", (1, 0))),
        "x*(x+1)*(x^2+x+1)",
        (("x", "a^2+a+c"), ("y", "x*(x+1)*(2*b-1)")),
        (), ()),
    ParamFamily(
        "10(3,2)", (("y", F_13),), C_3,
        (("a", "(x^3+2*x^2+x+1)/(2*x*(x+1))", (3, 0)), ("b", "-1/2+y/(2*x*(x+1))", (2, 0))),
        "x*y*(x+1)*(x^2+x+1)",
        (("x", "a^2+a+c"), ("y", "x*(x+1)*(2*b+1)")),
        (), ()),
    ParamFamily(
        "12(2)", (("y", QUARTIC), ("z", CUBIC)), C_B,
        (("a", "z/(x^2-1)", (2, 3)), ("s", "y/(x^2-1)", (2, 2))),
        "x*(x^2-1)*(x^2+4*x-1)*(x^2+2*x-1)",
        (("x", "(f1_a-1)/f2_a"), ("y", "s*(x^2-1)"), ("z", "a*(x^2-1)")),
        (("ne", ("s", 2), ("a", 3)),), ("-1/x",)),
    ParamFamily(
        "12(2,1,1)a", (("y", QUARTIC), ("z", "5*x^4+8*x^3+6*x^2-8*x+5")), C_B,
        (("r", "-(x^2+1)/(x^2-1)", (2, 2)), ("s", "y/(x^2-1)", (2, 2)),
         ("p", "1/2+z/(2*(x^2-1))", (1, 0))),
        "x*(x^2-1)*(x^2+4*x-1)*(x^2+2*x-1)",
        (("x", "(r-1)/(r^2+c)"), ("y", "s*(x^2-1)"), ("z", "(2*p-1)*(x^2-1)")),
        (("ne", ("r", 2), ("s", 2)),), ("-1/x",)),
    ParamFamily(
        "12(2,1,1)b", (("y", "-3*x^4+14*x^2+5"), ("z", CUBIC)), C_A,
        (("p", "(y+1-x^2)/(2*(x^2-1))", (2, 0)), ("q", "z/(x^2-1)", (1, 3))),
        "y*(x^2-1)",
        (("x", "f1_q/f2_q"), ("y", "(2*p+1)*(x^2-1)"), ("z", "q*(x^2-1)")),
        (), ("-x",)),
    ParamFamily(
        "12(4)", (("y", F_16),
                  ("z", "x*(-x^6+x^5+7*x^4+10*x^3-7*x^2+5*x+1)-2*x*(x-1)*(x+1)^2*y")), C_4,
        (("p", "z/(2*x*(x^2-1))", (4, 2)),),
        "y*(x^2-1)*(y*(x+1)+x*(x-1)^2)",
        (("x", "(f4_p+f2_p-1)/(f4_p+f2_p+1)"),
         ("y", "-(2*x*(x^2-1)*f1_p+x*(x-1)^2)/(x+1)"), ("z", "2*x*(x^2-1)*p")),
        (), ("-1/x",)),
    ParamFamily(
        "12(4,2)", (("y", F_16), ("z", "-x*(x^6-3*x^4-16*x^3+3*x^2-1)")), C_4,
        (("a", "(z-x*(x^2-1))/(2*x*(x^2-1))", (2, 0)), ("b", P4, (4, 0))),
        "y*z*(x^2-1)",
        (("x", "(1+b+f2_b)/(1-b-f2_b)"), ("y", "(2*x*(x^2-1)*b-x*(x-1)^2)/(x+1)"),
         ("z", "x*(x^2-1)*(2*a+1)")),
        (), ("-1/x",)),
    ParamFamily(
        "14(2,1,1)", (("y", CUBIC), ("z", "2*x*(x^3+x^2+x-1)")), C_B,
        (("a", "y/(x^2-1)", (2, 3)), ("b", "z/(x^2-1)", (2, 3))),
        "x*(x^4-1)*(x^2+4*x-1)",
        (("x", "(f1_a-1)/f2_a"), ("y", "a*(x^2-1)"), ("z", "b*(x^2-1)")),
        (("eq", ("a", 2), ("b", 2)), ("ne", ("a", 1), ("b", 1))), ("-1/x",)),
    ParamFamily(
        "14(3,1,1)", (("y", F_18), ("z", SEXTIC_32)), C_3,
        (("a", "(y+x^2+x)/(2*x*(x+1))", (1, 0)), ("b", "z/(2*x*(x+1))", (3, 2))),
        "x*(x+1)*(x^2+x+1)*(x^3+2*x^2+x+1)",
        (("x", "f2_b-f1_b"), ("y", "x*(x+1)*(2*a-1)"), ("z", "2*x*(x+1)*b")),
        (), ()),
    ParamFamily(
        "14(3,2)", (("y", F_13), ("z", SEXTIC_32)), C_3,
        (("a", "(y-x^2-x)/(2*x*(x+1))", (2, 0)), ("b", "z/(2*x*(x+1))", (3, 2))),
        "x*y*(x+1)*(x^2+x+1)*(x^3+2*x^2+x+1)",
        (("x", "f2_b-f1_b"), ("y", "x*(x+1)*(2*a+1)"), ("z", "2*x*(x+1)*b")),
        (), ()),
)}


_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


@lru_cache(maxsize=None)
def parse_formula(text: str) -> sympy.Expr:
    """Parse a table formula; every identifier is a plain symbol, products use '*'."""
    names = {n: sympy.Symbol(n) for n in _IDENT.findall(text)}
    return parse_expr(text, local_dict=names,
                      transformations=standard_transformations + (convert_xor,))


def free_names(text: str) -> set:
    return {s.name for s in parse_formula(text).free_symbols}


def _eval(text: str, env: dict):
    return evaluate(parse_formula(text), env)


def _iterate(P, c, n: int):
    for _ in range(n):
        P = P * P + c
    return P


# ------------------------------------------------------- instances

@dataclass
class Instance:
    tag: str
    x: Fraction
    K: QuadField
    c: QuadElement
    coords: dict
    points: dict
    label: str = ""
    contains_type: bool = False
    equals_type: bool = False
    preper: Optional[object] = field(default=None, repr=False)

    def to_json(self) -> dict:
        from .exactnum import fmt_q
        return {
            "type": self.tag, "x": fmt_q(self.x), "field": self.K.D,
            "c": format_element(self.c), "portrait": self.label,
            "contains_type": self.contains_type, "equals_type": self.equals_type,
            "points": {k: format_element(v) for k, v in self.points.items()},
        }


def family(tag: str) -> ParamFamily:
    try:
        return FAMILIES[tag]
    except KeyError:
        raise ValueError(f"no parameterization for type {tag}") from None


def solve_square_conditions(fam: ParamFamily, x) -> tuple[Optional[QuadField], dict]:
    """Coordinates (x, y, z, ...) in the common field of the square conditions.

    Returns (None, env) when every condition is a rational square.
    """
    x = Q(x)
    env: dict = {"x": x}
    K: Optional[QuadField] = None
    for var, rhs in fam.equations:
        v = _eval(rhs, env)
        if isinstance(v, QuadElement):
            r = sqrt_in_field(v)
        else:
            r = rational_sqrt(v)
            if r is None:
                if K is None:
                    K = make_field(v)
                    env = {k: QuadElement(K, u) for k, u in env.items()}
                    env["x"] = x
                r = sqrt_in_field(QuadElement(K, v))
        if r is None:
            raise InconsistentFields(f"{var}^2 = {v} has no root in {K}")
        env[var] = r
    return K, env


def instance_data(tag: str, x) -> tuple[QuadField, dict, QuadElement, dict]:
    """Field, curve coordinates, c and named points for a rational x (no dynamics)."""
    fam = family(tag)
    x = Q(x)
    if free_names(fam.excluded) <= {"x"} and _eval(fam.excluded, {"x": x}) == 0:
        raise DegenerateParameter(f"x = {x} is on the excluded locus of {tag}")
    K, env = solve_square_conditions(fam, x)
    if _eval(fam.excluded, env) == 0:
        raise DegenerateParameter(f"x = {x} is on the excluded locus of {tag}")
    if K is None:
        raise SquareDiscriminant(f"x = {x} gives a rational point, not a quadratic field")
    lift = lambda v: v if isinstance(v, QuadElement) else QuadElement(K, v)  # noqa: E731
    c = lift(_eval(fam.c, env))
    points = {name: lift(_eval(expr, env)) for name, expr, _ in fam.points}
    # every tag here has an even vertex count, so 0 is never a vertex of the type;
    # an orbit point equal to 0 merges with its own negative
    for name, _, (period, pre) in fam.points:
        P = points[name]
        for j in range(period + pre):
            if P == 0:
                raise DegenerateParameter(f"x = {x} gives f^{j}({name}) = 0")
            P = P * P + c
    return K, env, c, points


def check_relations(fam: ParamFamily, c, points: dict) -> list[str]:
    """Violated orbit relations (empty when the points behave as the type says)."""
    from .dynamics import orbit_type
    bad = []
    for name, _, role in fam.points:
        # a point of the stated type repeats within period + preperiod steps
        got = orbit_type(points[name], c, max_steps=sum(role))
        if got != tuple(role):
            bad.append(f"{name}: type {got} != {tuple(role)}")
    for kind, (n1, k1), (n2, k2) in fam.relations:
        same = _iterate(points[n1], c, k1) == _iterate(points[n2], c, k2)
        if same != (kind == "eq"):
            bad.append(f"f^{k1}({n1}) {'!=' if kind == 'eq' else '=='} f^{k2}({n2})")
    return bad


def invert(fam: ParamFamily, c, points: dict) -> dict:
    """Recover the curve coordinates from c and the points."""
    env: dict = {"c": c}
    for name, P in points.items():
        env[name] = P
        Y = P
        for n in range(1, 5):
            Y = Y * Y + c
            env[f"f{n}_{name}"] = Y
    out = {}
    for var, expr in fam.inverse:
        env[var] = out[var] = _eval(expr, env)
    return out


def instantiate(tag: str, x, verify: bool = True) -> Instance:
    """Field, c and points for rational x; verify runs the full portrait computation."""
    from .dynamics import preperiodic_points
    from .portraits import canonicalize, contains_type, default_catalogue, portrait_of, label_points
    fam = family(tag)
    K, env, c, points = instance_data(tag, x)
    coords = {v: env[v] for v in ("x",) + fam.variables}
    inst = Instance(tag, Q(x), K, c, coords, points)
    bad = check_relations(fam, c, points)
    if bad:
        raise VerificationFailed(f"{tag} at x = {x}: " + "; ".join(bad))
    if not verify:
        return inst
    S = preperiodic_points(c, K)
    missing = [n for n, P in points.items() if P not in S]
    if missing:
        raise VerificationFailed(f"points {missing} missing from the computed portrait")
    cat = default_catalogue()
    g = portrait_of(S.points, c)
    inst.preper = S
    inst.label = label_points(S.points, c, cat).text
    inst.contains_type = contains_type(g, cat.portraits[tag])
    inst.equals_type = canonicalize(g) == cat.forms[tag]
    if not inst.contains_type:
        raise VerificationFailed(f"portrait {inst.label} does not contain {tag}")
    return inst


__all__ = [
    "DegenerateParameter", "NotOnCurve", "SquareDiscriminant", "InconsistentFields",
    "VerificationFailed", "fixed_point_pair", "two_cycle", "three_cycle", "four_cycle", "F16",
    "ParamFamily", "FAMILIES", "Instance", "family", "instance_data", "instantiate",
    "check_relations", "invert", "parse_formula", "solve_square_conditions",
]
