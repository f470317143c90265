"""Reference data: portrait rows, curve points, known pairs and modular curve counts."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from itertools import product
from typing import Optional

from .curves import evaluate, parse_poly, verify_point
from .quadfield import QuadElement, QuadField, make_field, sqrt_in_field

DATA_FILES = ("appendix_c.json", "curve_points.json", "known_pairs.json", "modular_models.json")
MANIFEST = "MANIFEST.json"


def _read(name: str) -> bytes:
    return resources.files("preper").joinpath("data", name).read_bytes()


def load(name: str) -> dict:
    return json.loads(_read(name))


def sha256_of(name: str) -> str:
    return hashlib.sha256(_read(name)).hexdigest()


def write_manifest(path=None) -> dict:
    """Record sha256 digests of the data files (run after editing data)."""
    man = {"version": 1, "files": {n: sha256_of(n) for n in DATA_FILES}}
    target = path or resources.files("preper").joinpath("data", MANIFEST)
    with open(target, "w") as fh:
        json.dump(man, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return man


def check_manifest() -> dict[str, bool]:
    man = load(MANIFEST)
    return {n: man["files"].get(n) == sha256_of(n) for n in DATA_FILES}


def field_generator(poly: str, D: int) -> tuple[QuadField, QuadElement]:
    """The field and its generator g: the root (-p1 + sqrt(disc))/2 of t^2 + p1 t + p0."""
    p0, p1, p2 = parse_poly(poly, "t")
    if p2 != 1:
        raise ValueError("defining polynomial must be monic quadratic")
    disc = p1 * p1 - 4 * p0
    K = make_field(disc.numerator * disc.denominator)
    if K.D != D:
        raise ValueError(f"{poly} defines Q(sqrt({K.D})), not Q(sqrt({D}))")
    root = sqrt_in_field(K(disc))
    g = (root - p1) / 2
    return K, g


@dataclass(frozen=True)
class PortraitRow:
    label: str
    K: QuadField
    poly: str
    c: QuadElement
    points: tuple
    anchor: str

    def expanded_points(self) -> list[QuadElement]:
        out = []
        seen = set()
        for P in self.points:
            for Q in (P, -P):
                if Q not in seen:
                    seen.add(Q)
                    out.append(Q)
        return out


def _element(text: str, env: dict, K: QuadField) -> QuadElement:
    v = evaluate(text, env)
    return v if isinstance(v, QuadElement) else QuadElement(K, v)


@lru_cache(maxsize=1)
def appendix_rows() -> tuple[PortraitRow, ...]:
    rows = []
    for r in load("appendix_c.json")["rows"]:
        K, g = field_generator(r["poly"], r["D"])
        env = {"g": g}
        c = _element(r["c"], env, K)
        pts = tuple(_element(p, env, K) for p in r["points"])
        rows.append(PortraitRow(r["label"], K, r["poly"], c, pts, r["anchor"]))
    return tuple(rows)


def curve_systems() -> list[dict]:
    return load("curve_points.json")["systems"]


def expand_curve_point(entry: dict) -> list[dict]:
    """All sign choices of a curve-point entry, as exact coordinates."""
    D = entry.get("D")
    if D is None:
        K = None
        env: dict = {}
    else:
        K = make_field(D)
        env = {"s": K.sqrtD()}

    def ev(text):
        v = evaluate(text, env)
        return QuadElement(K, v) if K is not None and not isinstance(v, QuadElement) else v

    x = ev(entry["x"])
    env["x"] = x
    ys = entry["y"]
    y0 = ev(ys)
    z0 = ev(entry["z"]) if "z" in entry else None
    out = []
    signs_z = (1, -1) if z0 is not None else (None,)
    for sy, sz in product((1, -1), signs_z):
        pt = {"x": x, "y": sy * y0}
        if z0 is not None:
            pt["z"] = sz * z0
        out.append(pt)
    return out


def known_pairs() -> list[dict]:
    return load("known_pairs.json")["pairs"]


def modular_models() -> dict:
    return load("modular_models.json")


@dataclass
class FixtureReport:
    entries: list

    @property
    def ok(self) -> bool:
        return all(e[1] for e in self.entries)

    def failures(self) -> list:
        return [e for e in self.entries if not e[1]]

    def lines(self) -> list[str]:
        return [f"{'PASS' if ok else 'FAIL'}  {anchor}  {detail}" for anchor, ok, detail in self.entries]


def verify_all_fixtures(skip_slow: bool = False) -> FixtureReport:
    """Re-check every fixture; failures are report entries, not exceptions."""
    from .curves import HyperellipticModel, apply_parity, chabauty_bounds, count_points_mod_p, nonobvious_count
    from .dynamics import preperiodic_points
    from .portraits import contains_type, default_catalogue, label_points, portrait_of

    entries = []
    for name, ok in check_manifest().items():
        entries.append((f"manifest {name}", ok, "sha256"))
    for row in appendix_rows():
        try:
            S = preperiodic_points(row.c, row.K)
            same = set(S.points) == set(row.expanded_points())
            lab = label_points(S.points, row.c).text
            ok = same and lab == row.label
            detail = f"{row.K} c={row.c} points={len(S)} label={lab}"
        except Exception as exc:  # report, do not raise
            ok, detail = False, repr(exc)
        entries.append((f"{row.anchor} {row.K}", ok, detail))
    for sys_ in curve_systems():
        for entry in sys_["points"]:
            pts = expand_curve_point(entry)
            ok = all(verify_point(sys_["equations"], p) for p in pts)
            entries.append((f"{sys_['anchor']} x={entry['x']} D={entry.get('D')}", ok, f"{len(pts)} sign choices"))
    cat = default_catalogue()
    for kp in known_pairs():
        K = make_field(kp["D"])
        c = QuadElement(K, Fraction(kp["c"]))
        S = preperiodic_points(c, K)
        g = portrait_of(S.points, c)
        want = cat.portraits.get(kp["type"])
        ok = want is not None and contains_type(g, want)
        entries.append((f"{kp['anchor']} {K} c={kp['c']}", ok, f"portrait {label_points(S.points, c).text}"))
    mm = modular_models()
    for m in mm["models"]:
        try:
            q = nonobvious_count(m["j"], m["c"], m["w"])
            ok = q == m["q"]
        except ValueError as exc:
            q, ok = repr(exc), False
        entries.append((m["anchor"], ok, f"q={q}"))
    for a in mm["aux_curves"]:
        M = HyperellipticModel.from_text(a["f"])
        n = count_points_mod_p(M, a["p"])
        b = chabauty_bounds(a["g"], a["r"], a["p"], a["d"], n)
        raw = b.lt if a["method"] == "lt" else b.stoll
        final = apply_parity(raw, a["parity"])
        ok = n == a["count"] and raw == a["raw"] and final == a["bound"] and M.genus == a["g"]
        entries.append((a["anchor"], ok, f"#X(F_{a['p']})={n} bound={raw}->{final}"))
    return FixtureReport(entries)


def coverage() -> dict:
    """Labels with at least one portrait row, and systems with exhibited points."""
    labels = sorted({r.label for r in appendix_rows()})
    systems = [s["name"] for s in curve_systems() if s["points"]]
    return {"labels": labels, "systems_with_points": systems}
