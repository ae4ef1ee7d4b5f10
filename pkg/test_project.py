'''
Test Suite for the Support & Measure Command Line

This module drives main.cli() end to end on small JSON inputs written to a temporary
directory, and checks exit codes, written files, the run manifest and the error log.

Test Coverage:
--------------
- Dispatch: unknown subcommands (with a suggestion and an error-log line), missing flags, --help.
- solve-minkowski / blaschke-sum / roundtrip on squares.
- check-majorization: linear order with witness, refusal with a violating functional, affine order,
  and the vertical-vs-horizontal pair that fails although mass and resultant agree.
- verify: external Urysohn conditions that hold (disk) and fail (square around a disk).
- urysohn: free problem on a coarse grid, with manifest.
- render: SVG output, the "no output requested" error, and byte-identical SVG / OBJ reruns.

Validation Focus:
-----------------
- Exit codes 0 / 2 / 4 as documented in main.py
- Files are written only where asked and are byte-identical across reruns

Dependencies:
-------------
- pytest (tmp_path, monkeypatch)
- json
- main, cli_io
'''

import json
import math
import pytest
import cli_io
from main import cli

AXES = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]
SQUARE = {"dim": 2, "vertices": [[1, 1], [-1, 1], [-1, -1], [1, -1]]}

@pytest.fixture(autouse=True)
def error_log(tmp_path, monkeypatch):
    path = tmp_path / "error_log.txt"
    monkeypatch.setattr(cli_io, "ERROR_LOG", str(path))
    return path

def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)

def read(path):
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)

def atoms(dirs, weight):
    return {"dim": 2, "atoms": [{"u": u, "w": weight} for u in dirs]}

def disk(resolution=720, radius=1.0):
    return {"dim": 2, "grid": {"resolution": resolution}, "h": [radius] * resolution}

def test_unknown_command_is_suggested_and_logged(error_log):
    assert cli(["sovle-minkowski", "--measure", "m.json"]) == 2
    assert "Error running sovle-minkowski: unknown command." in error_log.read_text(encoding="utf-8")

def test_missing_flag_and_help():
    assert cli(["solve-minkowski"]) == 2
    assert cli(["--help"]) == 0

def test_missing_file(tmp_path, error_log):
    assert cli(["solve-minkowski", "--measure", str(tmp_path / "nope.json")]) == 2
    assert "Error running solve-minkowski" in error_log.read_text(encoding="utf-8")

def test_solve_minkowski_writes_the_square(tmp_path):
    measure = write(tmp_path, "square.json", atoms(AXES, 2.0))
    out = str(tmp_path / "body.json")
    assert cli(["solve-minkowski", "--measure", measure, "--grid", "8", "--out", out]) == 0
    body = read(out)
    assert body["dim"] == 2
    assert body["grid"]["resolution"] == 8
    assert body["h"][0] == pytest.approx(1.0)

def test_invalid_measure_is_rejected(tmp_path):
    measure = write(tmp_path, "open.json", atoms(AXES[:1], 1.0))
    assert cli(["solve-minkowski", "--measure", measure]) == 2

def test_blaschke_sum_of_two_squares(tmp_path):
    x = write(tmp_path, "x.json", SQUARE)
    out = str(tmp_path / "sum.json")
    assert cli(["blaschke-sum", "--x", x, "--y", x, "--grid", "8", "--out", out]) == 0
    assert read(out)["h"][0] == pytest.approx(2.0)

def test_roundtrip_of_a_measure(tmp_path):
    measure = write(tmp_path, "square.json", atoms(AXES, 2.0))
    assert cli(["roundtrip", "--measure", measure, "--grid", "8"]) == 0
    assert cli(["roundtrip", "--measure", measure, "--body", measure]) == 2

def test_check_majorization_linear(tmp_path):
    r = 1.0 / math.sqrt(2.0)
    mu = write(tmp_path, "mu.json", atoms(AXES, 1.0))
    nu = write(tmp_path, "nu.json", atoms([[r, r], [-r, -r]], math.sqrt(2.0)))
    heavy = write(tmp_path, "heavy.json", atoms(AXES, 2.0))
    out = str(tmp_path / "report.json")
    assert cli(["check-majorization", "--mu", mu, "--nu", nu, "--out", out]) == 0
    report = read(out)
    assert report["majorizes"] and report["witness_checks"]
    assert cli(["check-majorization", "--mu", mu, "--nu", heavy, "--out", out, "--seed", "3"]) == 4
    report = read(out)
    assert not report["majorizes"]
    assert report["violation"]["gap"] < 0

def test_check_majorization_affine(tmp_path):
    spread = write(tmp_path, "spread.json", {"points": [[-1.0, 0.0], [1.0, 0.0]], "weights": [1.0, 1.0]})
    point = write(tmp_path, "point.json", {"points": [[0.0, 0.0]], "weights": [2.0]})
    assert cli(["check-majorization", "--mu", spread, "--nu", point]) == 0
    assert cli(["check-majorization", "--mu", point, "--nu", spread, "--samples", "50"]) == 4
    mixed = write(tmp_path, "mixed.json", atoms(AXES, 1.0))
    assert cli(["check-majorization", "--mu", spread, "--nu", mixed]) == 2

def test_verify_external_urysohn(tmp_path):
    holds = write(tmp_path, "disk.json", {"condition": "external_urysohn", "xbar": disk(), "x0": disk(), "alpha": 1.0})
    out = str(tmp_path / "report.json")
    assert cli(["verify", "--spec", holds, "--out", out]) == 0
    assert read(out)["verdict"] is True
    fails = write(tmp_path, "square.json", {"condition": "external_urysohn", "xbar": SQUARE, "x0": disk(),
                                            "alpha": 1.0})
    assert cli(["verify", "--spec", fails, "--grid", "720"]) == 4
    unknown = write(tmp_path, "unknown.json", {"condition": "sideways", "xbar": disk(), "x0": disk()})
    assert cli(["verify", "--spec", unknown]) == 2

def test_free_urysohn_with_manifest(tmp_path):
    spec = write(tmp_path, "free.json", {"problem": "urysohn", "kind": "free", "breadth_target": 2.0,
                                         "grid": {"resolution": 120}})
    out, manifest = str(tmp_path / "disk.json"), str(tmp_path / "manifest.json")
    assert cli(["urysohn", "--spec", spec, "--out", out, "--manifest", manifest]) == 0
    assert len(read(out)["h"]) == 120
    first = (tmp_path / "manifest.json").read_bytes()
    data = read(manifest)
    assert data["command"] == "urysohn"
    assert data["outputs"] == [out]
    assert set(data["residuals"]) == {"breadth", "kkt_residual", "volume"}
    assert cli(["urysohn", "--spec", spec, "--out", out, "--manifest", manifest]) == 0
    assert (tmp_path / "manifest.json").read_bytes() == first

def test_render_svg(tmp_path):
    body = write(tmp_path, "square.json", SQUARE)
    svg = tmp_path / "square.svg"
    assert cli(["render", "--body", body, "--grid", "8", "--svg", str(svg)]) == 0
    text = svg.read_text(encoding="utf-8")
    assert text.startswith('<?xml version="1.0" encoding="UTF-8"?>')
    assert 'viewBox="-0.55 -0.55 1.1 1.1"' in text
    assert text.count(" L ") == 3
    assert cli(["render", "--body", body]) == 2

def test_check_majorization_reports_the_obstruction(tmp_path):
    mu = write(tmp_path, "vertical.json", atoms([[0.0, 1.0], [0.0, -1.0]], 1.0))
    nu = write(tmp_path, "horizontal.json", atoms([[1.0, 0.0], [-1.0, 0.0]], 1.0))
    out = str(tmp_path / "report.json")
    assert cli(["check-majorization", "--mu", mu, "--nu", nu, "--out", out, "--samples", "200"]) == 4
    report = read(out)
    assert not report["majorizes"]
    assert report["lp_infeasible"]
    assert report["violation"]["gap"] < 0
    assert "witness" not in report

def test_rendered_files_are_byte_identical(tmp_path):
    square = write(tmp_path, "square.json", SQUARE)
    cube = write(tmp_path, "cube.json", {"dim": 3, "vertices": [[x, y, z] for x in (-1, 1) for y in (-1, 1)
                                                                for z in (-1, 1)]})
    for body, flag, name, grid in ((square, "--svg", "square.svg", "16"), (cube, "--obj", "cube.obj", "1")):
        first, second = tmp_path / ("a_" + name), tmp_path / ("b_" + name)
        assert cli(["render", "--body", body, "--grid", grid, flag, str(first)]) == 0
        assert cli(["render", "--body", body, "--grid", grid, flag, str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()
        assert len(first.read_bytes()) > 0
