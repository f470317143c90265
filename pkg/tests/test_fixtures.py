import json

from preper.fixtures import (DATA_FILES, appendix_rows, check_manifest, coverage, curve_systems,
                             known_pairs, load, modular_models, verify_all_fixtures)
from preper.curves import verify_point
from preper.fixtures import expand_curve_point
from preper.portraits import default_catalogue
from preper.quadfield import make_field


def test_manifest_digests():
    assert all(check_manifest().values())
    assert set(load("MANIFEST.json")["files"]) == set(DATA_FILES)


def test_verify_all_fixtures_passes():
    rep = verify_all_fixtures()
    assert rep.ok, rep.failures()
    assert len(rep.entries) > 100
    assert all(line.startswith("PASS") for line in rep.lines())


def test_fourteen_point_row():
    rows = [r for r in appendix_rows() if r.label == "14(2,1,1)" and r.K.D == 17]
    assert rows and str(rows[0].c) == "-21/16"
    assert len(rows[0].expanded_points()) == 14


def test_known_pair_table():
    pairs = known_pairs()
    by_type = {}
    for p in pairs:
        by_type.setdefault(p["type"], []).append(p)
    assert len(by_type["12(2)"]) == 2
    assert len(by_type["12(4,2)"]) == 1
    assert all("anchor" in p for p in pairs)


def test_x16_points_present():
    x16 = [s for s in curve_systems() if s["name"] == "X1(16)"][0]
    pts = [pt for e in x16["points"] for pt in expand_curve_point(e)]
    xs = {pt["x"] for pt in pts} | {pt["x"].conj() for pt in pts}
    Ki, K2 = make_field(-1), make_field(2)
    assert xs == {Ki.sqrtD(), -Ki.sqrtD(), 1 + K2.sqrtD(), 1 - K2.sqrtD()}
    for x in xs:
        assert verify_point(x16["equations"], {"x": x, "y": x.K(0)})


def test_coverage():
    cov = coverage()
    assert set(cov["labels"]) == set(default_catalogue().forms)
    assert len(cov["labels"]) == 46
    # every system except X1(13), which has no non-obvious points (q = 0), carries points
    zero_q = {m["name"] for m in modular_models()["models"] if m["q"] == 0}
    assert zero_q == {"X1(13)"}
    assert set(cov["systems_with_points"]) == {s["name"] for s in curve_systems()} - zero_q


def test_failures_are_report_entries(monkeypatch):
    import preper.fixtures as fx
    real = fx.modular_models()
    broken = json.loads(json.dumps(real))
    broken["models"][0]["q"] = 2
    monkeypatch.setattr(fx, "modular_models", lambda: broken)
    rep = fx.verify_all_fixtures()
    assert not rep.ok
    assert [e[0] for e in rep.failures()] == [real["models"][0]["anchor"]]


def test_models_shape():
    mm = modular_models()
    assert [m["name"] for m in mm["models"]] == ["X1(13)", "X1(16)", "X1(18)"]
