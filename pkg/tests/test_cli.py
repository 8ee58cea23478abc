"""Command line behaviour: exit codes, determinism, and re-parsable output."""

import io
import json
import subprocess
import sys

import pytest

from cremona.cli import main
from cremona.parser import parse_polynomial

DUPIN = {
    "variables": ["x", "y", "z", "w"],
    "polynomial": "(x^2+y^2+z^2-w^2)^2 + w^2*((w-x)^2+y^2-z^2)",
    "hints": {"singular_points": [["1", "0", "0", "1"]], "general_points": [[0, 0, 1, 1]]},
}
CONE = {"polynomial": "x0^4 + x1^4 - x2^4"}
TD = {"polynomial": "4*(x0*x2-x1^2)*(x1*x3-x2^2)-(x0*x3-x1*x2)^2",
      "hints": {"singular_curves": [{"type": "twisted_cubic",
                                     "parametrization": ["s^3", "s^2*t", "s*t^2", "t^3"]}]}}


def _write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def _run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("model,cls,rho", [("p3", "1", "1/4"), ("blowup-p3-pt", "1,-1", "0"),
                                           ("p3", "3", "3/4"), ("p1xp2", "3,2", "2/3"),
                                           ("wps1112", "4", "4/5")])
def test_threshold(model, cls, rho, capsys):
    code, out, _ = _run(["threshold", "--model", model, "--class", cls], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["rho"] == rho and doc["zero_lt_rho_lt_one"] == (rho not in ("0",))


def test_threshold_errors(capsys):
    assert _run(["threshold", "--model", "p1xp2", "--class", "1"], capsys)[0] == 1
    assert _run(["threshold", "--model", "p9", "--class", "1"], capsys)[0] == 1
    assert _run(["threshold", "--model", "p3", "--class", "1.5"], capsys)[0] == 1


def test_linearize_verify_roundtrip(tmp_path, capsys):
    desc = _write(tmp_path, "dupin.json", DUPIN)
    code, out, _ = _run(["linearize", "-i", desc], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["status"] == "certified" and report["case"] == "CyclideExtraNode"
    for step in report["steps"]:
        for form in step["forms"]:
            parse_polynomial(form, step["source_variables"])
    code2, out2, _ = _run(["linearize", "-i", desc], capsys)
    assert out2 == out
    rep_path = tmp_path / "report.json"
    rep_path.write_text(out)
    code, out, _ = _run(["verify", "-i", desc, "--report", str(rep_path)], capsys)
    assert code == 0 and json.loads(out)["verified"] is True


def test_verify_rejects_tampered_plane(tmp_path, capsys):
    desc = _write(tmp_path, "td.json", TD)
    out_path = tmp_path / "td_report.json"
    assert _run(["linearize", "-i", desc, "-o", str(out_path)], capsys)[0] == 0
    report = json.loads(out_path.read_text())
    report["final"]["plane_form"] = "y2"
    out_path.write_text(json.dumps(report))
    code, out, _ = _run(["verify", "-i", desc, "--report", str(out_path)], capsys)
    assert code == 2 and json.loads(out)["verified"] is False


def test_classify(tmp_path, capsys):
    code, out, _ = _run(["classify", "-i", _write(tmp_path, "cone.json", CONE)], capsys)
    assert code == 2 and json.loads(out)["case"] == "Cone"
    code, out, _ = _run(["classify", "-i", _write(tmp_path, "td.json", TD)], capsys)
    assert code == 0 and json.loads(out)["case"] == "TwistedCubic"


def test_input_errors(tmp_path, capsys):
    assert _run(["linearize", "-i", str(tmp_path / "missing.json")], capsys)[0] == 1
    code, _, err = _run(["linearize", "-i", _write(tmp_path, "bad.json", {"polynomial": "2x0"})], capsys)
    assert code == 1 and "^" in err
    bad_hint = dict(CONE, hints={"lines": []})
    assert _run(["classify", "-i", _write(tmp_path, "h.json", bad_hint)], capsys)[0] == 1
    wrong = dict(TD, hints={"singular_points": [[0, 1, 0, 0]]})
    assert _run(["classify", "-i", _write(tmp_path, "w.json", wrong)], capsys)[0] == 1


def test_stdin(monkeypatch, capsys):
    monkeypatch.setattr(sys, "stdin", io.StringIO(json.dumps(CONE)))
    assert _run(["classify", "-i", "-"], capsys)[0] == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "cremona", "threshold", "--model", "p3", "--class", "1"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and json.loads(res.stdout)["rho"] == "1/4"
    res = subprocess.run([sys.executable, "-m", "cremona", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "cremona" in res.stdout
