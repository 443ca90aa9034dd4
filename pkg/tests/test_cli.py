import io
import json
import shutil
import subprocess
import sys

import pytest

from conftest import CORPUS
from loceq.cli import EXIT_DIAGNOSTICS, EXIT_OK, EXIT_RESOURCE, RunConfig, main, run_corpus, solve
from loceq.render import Viewport


def run(path, **kw):
    out, err = io.BytesIO(), io.StringIO()
    code = solve(RunConfig(input=path, **kw), out, err)
    return code, out.getvalue().decode(), err.getvalue()


def test_text_mode():
    code, out, _ = run(CORPUS / "orthocenter.lcs")
    assert code == EXIT_OK
    assert out == "xy + x - y^2 - 3y - 2 = 0\n"


def test_json_mode_is_deterministic():
    a = json.loads(run(CORPUS / "orthocenter.lcs", format="json")[1])
    b = json.loads(run(CORPUS / "orthocenter.lcs", format="json")[1])
    a.pop("timings"), b.pop("timings")
    assert a == b
    assert a["schema"] == 1 and a["degree"] == 2
    assert set(a["factors"]) == {"y + 1 = 0", "x - y - 2 = 0"}


def test_svg_and_csv_modes():
    vp = Viewport.parse("-5,-5,5,5", 64)
    code, svg, _ = run(CORPUS / "circle_midpoint.lcs", format="svg", viewport=vp)
    assert code == EXIT_OK and svg.count("<path") == 1
    code, csv, _ = run(CORPUS / "circle_midpoint.lcs", format="csv", viewport=vp)
    assert csv.startswith("x,y,path_id\n")


def test_parse_error_exit_code(tmp_path):
    bad = tmp_path / "bad.lcs"
    bad.write_text("X = Midpoint[A]\n")
    code, out, err = run(bad)
    assert code == EXIT_DIAGNOSTICS and out == ""
    assert "dsl:" in err and "arity" in err


def test_geometry_error_is_module_qualified(tmp_path):
    bad = tmp_path / "dof.lcs"
    bad.write_text("O = (0, 0)\nc = Circle[O, 1]\nP = Point[c]\nQ = Point[c]\nM = Midpoint[P, Q]\nLocusEquation[M, P]\n")
    code, _, err = run(bad)
    assert code == EXIT_DIAGNOSTICS and err.startswith("geom:")


def test_resource_limit_exit_code():
    code, _, err = run(CORPUS / "nephroid_parallel.lcs", step_budget=50)
    assert code == EXIT_RESOURCE
    assert "resource limit" in err


def test_trace_goal_prints_points(tmp_path):
    src = (CORPUS / "circle_midpoint.lcs").read_text().replace("LocusEquation", "Locus")
    f = tmp_path / "trace.lcs"
    f.write_text(src)
    code, out, _ = run(f, format="json")
    pts = json.loads(out)["points"]
    assert code == EXIT_OK and len(pts) >= 100
    assert all(abs((x - 2) ** 2 + (y - 3) ** 2 - 4) < 1e-9 for x, y in pts)


def test_environment_budget(monkeypatch, capsys):
    monkeypatch.setenv("LOCEQ_TIME_BUDGET", "30")
    assert main(["solve", str(CORPUS / "midpoint_axis.lcs")]) == EXIT_OK


def test_invalid_config():
    with pytest.raises(ValueError):
        RunConfig(input="x.lcs", format="pdf")
    with pytest.raises(ValueError):
        RunConfig(input="x.lcs", step_budget=0)


def test_console_script():
    proc = subprocess.run(
        [sys.executable, "-m", "loceq.cli", "solve", str(CORPUS / "bisector_parabola.lcs")],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and proc.stdout == "x^2 - 2y + 1 = 0\n"


def test_corpus_runner_passes():
    rows = run_corpus(CORPUS, workers=1)
    gating = [r for r in rows if r.status != "skip"]
    assert gating and all(r.status == "pass" for r in gating), [r for r in gating if r.status != "pass"]


def test_corpus_tampered_case(tmp_path):
    for name in ("orthocenter", "bisector_parabola", "midpoint_axis"):
        for suffix in (".lcs", ".expect.json"):
            shutil.copy(CORPUS / f"{name}{suffix}", tmp_path)
    side = tmp_path / "midpoint_axis.expect.json"
    data = json.loads(side.read_text())
    data["equation"] = "x"
    side.write_text(json.dumps(data))
    rows = run_corpus(tmp_path, workers=2)
    assert [r.name for r in rows if r.status == "fail"] == ["midpoint_axis"]
    assert sum(r.status == "pass" for r in rows) == 2


def test_empty_corpus(tmp_path, capsys):
    assert run_corpus(tmp_path) == []
    assert main(["corpus", str(tmp_path)]) == EXIT_OK
