import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from preper import cli


def run(argv):
    out = io.StringIO()
    rc = cli.main(argv, out=out)
    return rc, out.getvalue()


def records(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def test_preper_command():
    rc, text = run(["preper", "--field", "5", "--c", "-1"])
    (rec,) = records(text)
    assert rc == 0 and rec["count"] == 7 and rec["label"] == "7(2,1,1)b"
    rc, text = run(["preper", "--field", "5", "--c", "-1", "--method", "heights"])
    assert records(text)[0]["points"] == rec["points"]


def test_parametrize_command():
    rc, text = run(["parametrize", "--type", "10(3,1,1)", "--x", "2"])
    (rec,) = records(text)
    assert rc == 0 and rec["field"] == 337 and rec["c"] == "-301/144" and rec["equals_type"] is True
    rc, _ = run(["parametrize", "--type", "8(4)", "--x", "0"])
    assert rc == 2
    rc, _ = run(["parametrize", "--type", "10(2)", "--x", "1"])
    assert rc == 2


def test_count_command():
    rc, text = run(["count", "--T", "5", "--alpha", "0", "--beta", "1"])
    (rec,) = records(text)
    assert rec["count"] == 10 and rec["constant"] == "3/pi^2" and rec["ratio"] == 10 / 25
    _, text = run(["count", "--T", "50", "--alpha", "-1", "--beta", "2", "--method", "mobius"])
    _, text2 = run(["count", "--T", "50", "--alpha", "-1", "--beta", "2"])
    assert records(text)[0]["count"] == records(text2)[0]["count"]


def test_curve_commands():
    _, text = run(["curve", "count-fp", "--f", "x^7+3*x^6+x^5-3*x^4+x^3+3*x^2-3*x+1", "--p", "3"])
    assert records(text)[0]["count"] == 7
    _, text = run(["curve", "bound", "--g", "3", "--r", "1", "--p", "13", "--d", "1",
                   "--count", "16", "--parity", "odd"])
    rec = records(text)[0]
    assert rec["stoll"] == 18 and rec["final"] == 17
    rc, text = run(["curve", "verify", "--equation", "y^2=2*(x^3+x^2-x+1)",
                    "--equation", "z^2=-2*(x^3-x^2-x-1)", "--field", "2",
                    "--point", "x=0", "--point", "y=s", "--point", "z=s"])
    assert rc == 0 and records(text)[0]["on_curve"] is True
    rc, text = run(["curve", "verify", "--equation", "y^2=2*(x^3+x^2-x+1)",
                    "--point", "x=1", "--point", "y=1"])
    assert rc == 1 and records(text)[0]["on_curve"] is False


def test_usage_errors_exit_nonzero(tmp_path):
    assert run(["preper", "--field", "5", "--c", "one"])[0] == 2
    assert run(["survey"])[0] == 2
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    assert run(["survey", "--fields", "5", "--config", str(cfg)])[0] == 2
    with pytest.raises(SystemExit):
        run(["no-such-command"])


def test_fields_up_to():
    got = cli.fields_up_to(12)
    assert got == [-3, -1, 5, -7, -2, 2, -11, 3]
    # oracle: squarefree D != 1 with |disc| <= 12
    want = [D for D in range(-12, 13) if D not in (0, 1)
            and all(D % (k * k) for k in (2, 3)) and abs(cli.field_discriminant(D)) <= 12]
    assert sorted(got) == sorted(want)


def test_schedule_interpolation(tmp_path):
    sch = cli.parse_schedule("1:1000, 200:2200")
    assert cli.schedule_value(sch, 1) == 1000
    assert cli.schedule_value(sch, 200) == 2200 and cli.schedule_value(sch, 999) == 2200
    assert cli.schedule_value(sch, 100) == 1000 + Fraction(99, 199) * 1200
    cfg = tmp_path / "p.cfg"
    cfg.write_text("disc_bound = 8\nheight_schedule = 1:10, 8:24\n"
                   "rational_height_schedule = 1:3/2, 8:5\nworker_count = 2\ncache_dir = /x\n")
    got = cli.load_config(str(cfg))
    assert got["disc_bound"] == 8 and got["worker_count"] == 2
    assert got["rational_height_schedule"][0] == (1, Fraction(3, 2))


def test_cache_dir_precedence(monkeypatch, tmp_path):
    monkeypatch.delenv(cli.CACHE_ENV, raising=False)
    monkeypatch.setenv("XDG_CACHE_HOME", str(tmp_path))
    assert cli.cache_dir({}) == tmp_path / "preper"
    assert str(cli.cache_dir({"cache_dir": "/c"})) == "/c"
    monkeypatch.setenv(cli.CACHE_ENV, "/env")
    assert str(cli.cache_dir({"cache_dir": "/c"})) == "/env"
    assert str(cli.cache_dir({}, "/flag")) == "/flag"


SURVEY = ["survey", "--fields", "5,-1", "--height-bound", "30", "--rational-height-bound", "4"]


def test_survey_resume_is_byte_identical(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.CACHE_ENV, str(tmp_path))
    rc, first = run(SURVEY)
    assert rc == 0 and first
    markers = sorted(p.name for p in (tmp_path / "survey").glob("*.done"))
    assert len(markers) == 2
    # a resumed run must not call the survey at all
    import preper.dynamics as dyn
    monkeypatch.setattr(dyn, "survey", lambda *a, **k: pytest.fail("recomputed"))
    rc, second = run(SURVEY + ["--resume"])
    assert rc == 0 and second == first


def test_survey_from_disc_bound_config(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.CACHE_ENV, str(tmp_path))
    cfg = tmp_path / "s.cfg"
    cfg.write_text("disc_bound = 4\nheight_schedule = 1:6, 4:6\nrational_height_schedule = 1:2, 4:2\n")
    rc, text = run(["survey", "--config", str(cfg)])
    fields = {r["D"] for r in records(text)}
    assert rc == 0 and fields <= {-3, -1}
    assert {p.name for p in (tmp_path / "survey").glob("*.done")} == {"D-3_B6_R2.done", "D-1_B6_R2.done"}


class Interrupt(Exception):
    pass


class FailingWriter(io.StringIO):
    """Stream that dies after a few lines, like an interrupted run."""

    def __init__(self, limit):
        super().__init__()
        self.limit = limit

    def write(self, s):
        if self.getvalue().count("\n") >= self.limit:
            raise Interrupt
        return super().write(s)


def test_partial_survey_output_is_valid_jsonl(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.CACHE_ENV, str(tmp_path))
    out = FailingWriter(5)
    with pytest.raises(Interrupt):
        cli.main(SURVEY, out=out)
    lines = out.getvalue().splitlines()
    assert len(lines) == 5 and all(json.loads(line) for line in lines)
    assert not list((tmp_path / "survey").glob("D5_*.done"))


def test_classify_round_trip(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.CACHE_ENV, str(tmp_path))
    _, text = run(SURVEY)
    src = tmp_path / "r.jsonl"
    src.write_text(text)
    rc, again = run(["classify", "--input", str(src)])
    assert rc == 0 and again == text
    _, table = run(["classify", "--input", str(src), "--format", "csv"])
    rows = list(csv.reader(io.StringIO(table)))
    assert rows[0] == ["label", "count"]
    assert sum(int(r[1]) for r in rows[1:]) == len(records(text))
    _, txt = run(["classify", "--input", str(src), "--format", "text"])
    assert len(txt.splitlines()) == len(rows) - 1


def test_fixtures_command():
    rc, text = run(["fixtures", "verify"])
    assert rc == 0 and text.rstrip().endswith("passed")


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "preper.cli", "count", "--T", "5",
                          "--alpha", "0", "--beta", "1"], capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["count"] == 10
