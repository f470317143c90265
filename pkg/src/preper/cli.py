"""Command-line front end: surveys, single queries, parameterizations, curves and counts."""
from __future__ import annotations

import argparse
import configparser
import csv
import json
import math
import os
import sys
import tempfile
from collections import Counter
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .exactnum import Q, fmt_q

CACHE_ENV = "PREPER_CACHE_DIR"


class UsageError(Exception):
    pass


# ------------------------------------------------------------- config

def parse_schedule(text: str) -> list[tuple[Fraction, Fraction]]:
    """Anchor pairs "d1:B1, d2:B2, ..." for a piecewise-linear schedule in |Delta|."""
    pts = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        d, _, b = item.partition(":")
        if not b:
            raise UsageError(f"schedule entry {item!r} is not of the form d:B")
        pts.append((Q(d.strip()), Q(b.strip())))
    if not pts:
        raise UsageError("empty schedule")
    pts.sort()
    return pts


def schedule_value(schedule: Sequence[tuple[Fraction, Fraction]], x) -> Fraction:
    """Exact piecewise-linear interpolation, constant outside the anchors."""
    x = Q(x)
    if x <= schedule[0][0]:
        return schedule[0][1]
    for (x0, y0), (x1, y1) in zip(schedule, schedule[1:]):
        if x <= x1:
            return y0 + (x - x0) * (y1 - y0) / (x1 - x0)
    return schedule[-1][1]


def load_config(path: Optional[str]) -> dict:
    """key = value file; numbers are exact "num/den" rationals."""
    if not path:
        return {}
    cp = configparser.ConfigParser()
    try:
        with open(path) as fh:
            cp.read_string("[preper]\n" + fh.read())
    except (OSError, configparser.Error) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    raw = dict(cp["preper"])
    out: dict = {}
    for key, val in raw.items():
        if key == "disc_bound":
            out[key] = int(Q(val))
        elif key in ("height_schedule", "rational_height_schedule"):
            out[key] = parse_schedule(val)
        elif key == "worker_count":
            out[key] = int(Q(val))
        elif key == "cache_dir":
            out[key] = val
        else:
            raise UsageError(f"unknown config key {key!r}")
    return out


def cache_dir(cfg: dict, override: Optional[str] = None) -> Path:
    if override:
        return Path(override)
    if os.environ.get(CACHE_ENV):
        return Path(os.environ[CACHE_ENV])
    if cfg.get("cache_dir"):
        return Path(cfg["cache_dir"])
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "preper"


def atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ------------------------------------------------------------- fields

def field_discriminant(D: int) -> int:
    return D if D % 4 == 1 else 4 * D


def fields_up_to(N: int) -> list[int]:
    """Squarefree D != 1 with |Delta| <= N, ordered by |Delta| then D."""
    if N < 3:
        return []
    sq = [True] * (N + 1)
    for p in range(2, math.isqrt(N) + 1):
        for k in range(p * p, N + 1, p * p):
            sq[k] = False
    out = []
    for n in range(2, N + 1):
        if not sq[n]:
            continue
        for D in (n, -n):
            if abs(field_discriminant(D)) <= N:
                out.append(D)
    if N >= 4:
        out.append(-1)
    return sorted(set(out), key=lambda D: (abs(field_discriminant(D)), D))


# ------------------------------------------------------------- output

def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(", ", ": "))


def emit(out, obj) -> None:
    out.write(dumps(obj) + "\n")
    out.flush()


# ------------------------------------------------------------- commands

def cmd_survey(args, out) -> int:
    from .dynamics import default_height_bound, default_rational_height_bound, survey
    from .quadfield import make_field
    cfg = load_config(args.config)
    if args.fields:
        Ds = [int(d) for d in args.fields.split(",") if d.strip()]
    else:
        N = args.disc_bound if args.disc_bound is not None else cfg.get("disc_bound")
        if N is None:
            raise UsageError("survey needs --fields or --disc-bound (or disc_bound in the config)")
        Ds = fields_up_to(int(N))
    workers = args.workers or cfg.get("worker_count", 1)
    cdir = cache_dir(cfg, args.cache_dir) / "survey"
    for D in Ds:
        K = make_field(D)
        dabs = abs(field_discriminant(K.D))
        if args.height_bound is not None:
            B = Q(args.height_bound)
        elif "height_schedule" in cfg:
            B = schedule_value(cfg["height_schedule"], dabs)
        else:
            B = default_height_bound(dabs)
        if args.rational_height_bound is not None:
            R = Q(args.rational_height_bound)
        elif "rational_height_schedule" in cfg:
            R = schedule_value(cfg["rational_height_schedule"], dabs)
        elif args.no_rational:
            R = None
        else:
            R = default_rational_height_bound(dabs)
        stem = f"D{K.D}_B{fmt_q(B).replace('/', '-')}_R{'none' if R is None else fmt_q(R).replace('/', '-')}"
        data_path, marker = cdir / f"{stem}.jsonl", cdir / f"{stem}.done"
        if args.resume and marker.exists() and data_path.exists():
            out.write(data_path.read_text())
            out.flush()
            continue
        res = survey(K, B, include_rational_c_up_to=R, workers=workers)
        lines = []
        for rec in res.records:
            obj = rec.to_json()
            obj["D"] = K.D
            line = dumps(obj)
            lines.append(line + "\n")
            out.write(line + "\n")
            out.flush()
        atomic_write(data_path, "".join(lines).encode())
        summary = {"D": K.D, "B": fmt_q(B), "R": None if R is None else fmt_q(R),
                   "params": res.params_total, "records": len(res.records),
                   "empty": res.empty, "rejected": res.rejected}
        atomic_write(marker, (dumps(summary) + "\n").encode())
    return 0


def _record(D: int, S) -> dict:
    from .portraits import label_points
    lab = label_points(S.points, S.c)
    obj = {"D": D, "field": f"Q(sqrt({D}))", "c": str(S.c),
           "points": sorted(str(p) for p in S.points), "count": len(S.points),
           "label": lab.text}
    if lab.novel:
        obj["novel"] = True
    return obj


def cmd_preper(args, out) -> int:
    from .dynamics import preperiodic_points
    from .quadfield import make_field, parse_element
    K = make_field(int(args.field))
    try:
        c = parse_element(args.c, K)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    S = preperiodic_points(c, K, method=args.method)
    emit(out, _record(K.D, S))
    return 0


def classify_records(lines: Iterable[str]) -> Iterable[dict]:
    """Relabel JSON-lines records from their own c and points."""
    from .portraits import label_points
    from .quadfield import parse_element, parse_field
    for line in lines:
        line = line.strip()
        if not line:
            continue
        obj = json.loads(line)
        K = parse_field(str(obj.get("D", obj.get("field"))))
        c = parse_element(obj["c"], K)
        pts = [parse_element(p, K) for p in obj["points"]]
        lab = label_points(pts, c)
        obj = dict(obj)
        obj["label"] = lab.text
        if lab.novel:
            obj["novel"] = True
        else:
            obj.pop("novel", None)
        yield obj


def cmd_classify(args, out) -> int:
    src = sys.stdin if args.input in (None, "-") else open(args.input)
    try:
        recs = list(classify_records(src))
    finally:
        if src is not sys.stdin:
            src.close()
    if args.format == "jsonl":
        for r in recs:
            emit(out, r)
    else:
        freq = Counter(r["label"] for r in recs)
        rows = sorted(freq.items(), key=lambda t: (-t[1], t[0]))
        if args.format == "csv":
            w = csv.writer(out, lineterminator="\n")
            w.writerow(["label", "count"])
            w.writerows(rows)
        else:
            width = max((len(k) for k, _ in rows), default=5)
            for k, v in rows:
                out.write(f"{k:<{width}}  {v}\n")
    return 0


def cmd_parametrize(args, out) -> int:
    from .param import FAMILIES, instantiate
    if args.type not in FAMILIES:
        raise UsageError(f"no parameterization for type {args.type}; known: {', '.join(FAMILIES)}")
    inst = instantiate(args.type, Q(args.x), verify=not args.no_verify)
    emit(out, inst.to_json())
    return 0


def _point_env(items: Sequence[str], D: Optional[int]) -> dict:
    from .curves import evaluate
    from .quadfield import QuadElement, make_field
    env: dict = {}
    K = make_field(D) if D is not None else None
    if K is not None:
        env["s"] = K.sqrtD()
    pt = {}
    for item in items:
        name, _, expr = item.partition("=")
        if not expr:
            raise UsageError(f"point coordinate {item!r} is not name=value")
        v = evaluate(expr, env)
        if K is not None and not isinstance(v, QuadElement):
            v = QuadElement(K, v)
        pt[name.strip()] = v
    return pt


def cmd_curve(args, out) -> int:
    from .curves import (HyperellipticModel, apply_parity, chabauty_bounds,
                         count_points_mod_p, verify_point)
    if args.curve_cmd == "count-fp":
        M = HyperellipticModel.from_text(args.f, Q(args.d))
        emit(out, {"f": args.f, "d": fmt_q(Q(args.d)), "p": args.p, "genus": M.genus,
                   "count": count_points_mod_p(M, args.p)})
    elif args.curve_cmd == "bound":
        count = args.count
        if count is None:
            if not args.f:
                raise UsageError("bound needs --count or --f")
            count = count_points_mod_p(HyperellipticModel.from_text(args.f, Q(args.fd)), args.p)
        b = chabauty_bounds(args.g, args.r, args.p, args.d, count)
        best = b.best()
        obj = {"count": count, "coleman": b.coleman, "lt": b.lt, "stoll": b.stoll,
               "lt_exact": b.lt_exact if isinstance(b.lt_exact, str) else fmt_q(b.lt_exact),
               "best": best}
        if args.parity and best is not None:
            obj["final"] = apply_parity(best, args.parity)
        emit(out, obj)
    elif args.curve_cmd == "verify":
        system = {}
        for eq in args.equation:
            var, _, rhs = eq.partition("^2=")
            if not rhs:
                raise UsageError(f"equation {eq!r} is not of the form y^2=...")
            system[var.strip()] = rhs
        pt = _point_env(args.point, args.field)
        ok = verify_point(system, pt)
        emit(out, {"on_curve": ok})
        return 0 if ok else 1
    return 0


def cmd_count(args, out) -> int:
    from .counting import asymptotic_constant, count_rationals, count_rationals_mobius
    T = Q(args.T)
    fn = count_rationals_mobius if args.method == "mobius" else count_rationals
    n = fn(T, Q(args.alpha), Q(args.beta))
    const = asymptotic_constant(Q(args.alpha), Q(args.beta))
    emit(out, {"T": fmt_q(T), "alpha": fmt_q(Q(args.alpha)), "beta": fmt_q(Q(args.beta)),
               "count": n, "ratio": n / float(T) ** 2, "constant": str(const),
               "constant_value": const.value})
    return 0


def cmd_fixtures(args, out) -> int:
    from .fixtures import verify_all_fixtures
    rep = verify_all_fixtures()
    for line in rep.lines():
        out.write(line + "\n")
    out.write(f"{len(rep.entries) - len(rep.failures())}/{len(rep.entries)} passed\n")
    return 0 if rep.ok else 1


# ------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="preper", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("survey", help="PrePer(f_c, K) over a range of fields and parameters")
    s.add_argument("--disc-bound", type=int)
    s.add_argument("--fields", help="comma-separated squarefree D")
    s.add_argument("--height-bound", help="B: parameters with H_K(c) <= B")
    s.add_argument("--rational-height-bound", help="also rational c with H(c) <= this")
    s.add_argument("--no-rational", action="store_true", help="skip the rational-c sweep")
    s.add_argument("--resume", action="store_true", help="reuse completed (field, B) results")
    s.add_argument("--workers", type=int)
    s.add_argument("--config")
    s.add_argument("--cache-dir")
    s.set_defaults(fn=cmd_survey)

    s = sub.add_parser("preper", help="preperiodic points of z^2 + c over Q(sqrt(D))")
    s.add_argument("--field", required=True, type=int)
    s.add_argument("--c", required=True)
    s.add_argument("--method", choices=("box", "heights"), default="box")
    s.set_defaults(fn=cmd_preper)

    s = sub.add_parser("classify", help="relabel JSON-lines records")
    s.add_argument("--input")
    s.add_argument("--format", choices=("jsonl", "csv", "text"), default="jsonl")
    s.set_defaults(fn=cmd_classify)

    s = sub.add_parser("parametrize", help="instance of a parameterized portrait type")
    s.add_argument("--type", required=True)
    s.add_argument("--x", required=True)
    s.add_argument("--no-verify", action="store_true")
    s.set_defaults(fn=cmd_parametrize)

    s = sub.add_parser("curve", help="hyperelliptic curve utilities")
    cs = s.add_subparsers(dest="curve_cmd", required=True)
    c1 = cs.add_parser("count-fp")
    c1.add_argument("--f", required=True, help="f(x) for d*y^2 = f(x)")
    c1.add_argument("--d", default="1")
    c1.add_argument("--p", required=True, type=int)
    c2 = cs.add_parser("bound")
    for name in ("--g", "--r", "--p", "--d"):
        c2.add_argument(name, required=True, type=int)
    c2.add_argument("--count", type=int)
    c2.add_argument("--f")
    c2.add_argument("--fd", default="1", help="d in d*y^2 = f(x) when counting from --f")
    c2.add_argument("--parity", choices=("odd", "even"))
    c3 = cs.add_parser("verify")
    c3.add_argument("--equation", action="append", required=True, help='e.g. "y^2=2*(x^3+x^2-x+1)"')
    c3.add_argument("--point", action="append", required=True, help='e.g. "x=1" or "y=s" (s = sqrt(D))')
    c3.add_argument("--field", type=int)
    s.set_defaults(fn=cmd_curve)

    s = sub.add_parser("count", help="nonzero rationals of height <= T in [alpha, beta]")
    s.add_argument("--T", required=True)
    s.add_argument("--alpha", required=True)
    s.add_argument("--beta", required=True)
    s.add_argument("--method", choices=("enumerate", "mobius"), default="enumerate")
    s.set_defaults(fn=cmd_count)

    s = sub.add_parser("fixtures", help="reference data checks")
    fs = s.add_subparsers(dest="fixtures_cmd", required=True)
    fs.add_parser("verify")
    s.set_defaults(fn=cmd_fixtures)
    return ap


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args, out)
    except (UsageError, ValueError, ZeroDivisionError) as exc:
        print(f"preper {args.cmd}: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        # reader went away (e.g. piped into head); completed records are already written
        if out is sys.stdout:
            os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0


if __name__ == "__main__":
    sys.exit(main())
