import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from topophase import catalog
from topophase import io as fio
from topophase.cli import main
from topophase.errors import ParseError
from topophase.majorana import state_to_constellation
from topophase.phase import geometric_phase
from topophase.rotor import from_axis_angle, geodesic_path, loop_about
from topophase.spincore import Spin, basis_state

R1 = from_axis_angle([0.0, 0.0, 1.0], 2 * math.pi / 3)


def run(args, capsys):
    code = main([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path, tetra):
    paths = {
        "tetra": tmp_path / "tetra.json",
        "geo": tmp_path / "geo.json",
        "looped": tmp_path / "looped.json",
        "ident": tmp_path / "ident.json",
        "top": tmp_path / "top.json",
        "flip": tmp_path / "flip.json",
    }
    paths["tetra"].write_text(fio.dumps_json(fio.state_to_dict(tetra)))
    paths["top"].write_text(fio.dumps_json(fio.state_to_dict(basis_state(Spin(4), 2))))
    geo = geodesic_path(R1, 400)
    paths["geo"].write_text(fio.dumps_json(fio.path_to_dict(geo)))
    paths["looped"].write_text(fio.dumps_json(fio.path_to_dict(geo.then(loop_about([1.0, 0, 0], 2 * math.pi, 400)))))
    paths["ident"].write_text(json.dumps({"aa": [[0, 0, 1, 0]] * 10}))
    flip = geodesic_path(from_axis_angle([1.0, 0, 0], math.pi), 200)
    paths["flip"].write_text(fio.dumps_json(fio.path_to_dict(flip)))
    return paths


def test_constellation_json_and_csv(files, capsys, tmp_path):
    code, out, _ = run(["constellation", files["tetra"]], capsys)
    assert code == 0
    data = json.loads(out)
    assert len(data["stars"]) == 4
    c = fio.constellation_from_dict(data)
    assert c.count_at([0, 0, 1]) == 1
    assert data["manifest"]["command"] == "constellation"
    code, out, _ = run(["constellation", files["top"], "--format", "csv"], capsys)
    rows = list(csv.reader(out.splitlines()))
    assert rows[0] == ["x", "y", "z", "mult"] and len(rows) == 2
    assert [float(v) for v in rows[1]] == [0, 0, 1, 4]
    svg = tmp_path / "stars.svg"
    assert run(["constellation", "builtin:cube", "--svg", svg], capsys)[0] == 0
    assert svg.read_text().count("<circle") == 9


def test_parse_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, out, err = run(["constellation", bad], capsys)
    assert code == 2 and out == "" and "invalid JSON" in err
    assert run(["constellation", tmp_path / "missing.json"], capsys)[0] == 2
    assert run(["constellation", "builtin:nope"], capsys)[0] == 2
    short = tmp_path / "short.json"
    short.write_text(json.dumps({"twice_s": 2, "amplitudes": [[1, 0]]}))
    assert run(["constellation", short], capsys)[0] == 2
    zero = tmp_path / "zero.json"
    zero.write_text(json.dumps({"twice_s": 1, "amplitudes": [[0, 0], [0, 0]]}))
    assert run(["constellation", zero], capsys)[0] == 3
    with pytest.raises(ParseError):
        fio.path_from_dict({"nothing": 1})


def test_phase_table_csv(capsys):
    code, out, _ = run(["phase-table", "--samples", "0"], capsys)
    assert code == 0
    rows = list(csv.DictReader(out.splitlines()))
    by = {(r["state"], int(r["order"])): float(r["abs_phase_over_pi"]) for r in rows}
    assert by[("Tetrahedron", 2)] == pytest.approx(0, abs=1e-9)
    assert by[("Tetrahedron", 3)] == pytest.approx(2 / 3, abs=1e-9)
    for order, val in ((2, 1), (3, 0), (4, 1)):
        assert by[("Octahedron", order)] == pytest.approx(val, abs=1e-9)
        assert by[("Cube", order)] == pytest.approx(0, abs=1e-9)


def test_phase_path(files, capsys, tetra):
    code, out, _ = run(["phase-path", files["tetra"], files["geo"]], capsys)
    assert code == 0
    rep = fio.phase_report_from_dict(json.loads(out))
    assert rep.geometric == pytest.approx(2 * math.pi / 3, abs=1e-6)
    assert rep == geometric_phase(fio.load_path(files["geo"]), tetra)
    code, out, _ = run(["phase-path", files["tetra"], files["geo"], "--samples", 1000], capsys)
    assert json.loads(out)["n_samples"] == 1000
    code, out, _ = run(["phase-path", files["tetra"], files["ident"]], capsys)
    assert json.loads(out)["geometric"] == 0
    top1 = basis_state(Spin(1), 0.5)
    (files["flip"].parent / "up.json").write_text(fio.dumps_json(fio.state_to_dict(top1)))
    code, _, err = run(["phase-path", files["flip"].parent / "up.json", files["flip"]], capsys)
    assert code == 4 and err


def test_symmetry_and_homotopy(files, capsys):
    code, out, _ = run(["symmetry", files["tetra"]], capsys)
    data = json.loads(out)
    assert data["schoenflies_tag"] == "T" and data["order"] == 12 and data["binary_order"] == 24
    assert len(data["elements_axis_angle"]) == 12
    assert data["anticoherence_order"] == 2
    _, out, _ = run(["homotopy", files["tetra"], files["geo"]], capsys)
    plain = json.loads(out)
    _, out, _ = run(["homotopy", files["tetra"], files["looped"]], capsys)
    looped = json.loads(out)
    assert plain["class_index"] != looped["class_index"]
    np.testing.assert_allclose(plain["class_quaternion"], -np.array(looped["class_quaternion"]), atol=1e-12)
    assert abs(plain["predicted_phase"]) == pytest.approx(abs(looped["predicted_phase"]))
    assert plain["predicted_phase"] == pytest.approx(2 * math.pi / 3)


def test_noise_study(tmp_path, capsys):
    out = tmp_path / "ns.json"
    args = ["noise-study", "--epsilon", "0.1", "--trials", "200", "--seed", "4", "--out", out]
    assert run(args, capsys)[0] == 0
    rep = json.loads(out.read_text())
    assert 3e-3 <= rep["mean_abs_error"][0] <= 3e-2
    assert 3e-4 <= rep["nhat_spread"][0] <= 3e-3
    assert rep["manifest"]["seed"] == 4
    trials = list(csv.DictReader(open(str(out) + ".trials.csv")))
    assert len(trials) == 200
    assert np.mean([float(t["abs_error"]) for t in trials]) == pytest.approx(rep["mean_abs_error"][0], rel=1e-12)
    first = out.read_text()
    assert run(args, capsys)[0] == 0
    assert out.read_text() == first
    assert run(["noise-study", "--epsilon", "0.1"], capsys)[0] == 2


def test_noise_study_toml_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.toml"
    cfg.write_text('seed = 9\nn_trials = 2\nepsilon = 0.3\nn_samples = 800\nmode = "invariance"\n')
    code, out, _ = run(["noise-study", "--config", cfg], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["all_classes_unchanged"] and len(data["elements"]) == 11
    bad = tmp_path / "bad.toml"
    bad.write_text("seed = = 1")
    assert run(["noise-study", "--config", bad], capsys)[0] == 2
    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({"seed": 1, "bogus": 2}))
    assert run(["noise-study", "--config", unknown], capsys)[0] == 2


def test_cells(tmp_path, capsys):
    prefix = tmp_path / "tet"
    assert run(["cells", "builtin:tetrahedron", "--emit-ball", "--directions", 300, "--out", prefix], capsys)[0] == 0
    ball = np.loadtxt(f"{prefix}_group.csv", delimiter=",", skiprows=1)
    assert ball.shape == (15, 3)
    boundary = np.loadtxt(f"{prefix}_identity_cell.csv", delimiter=",", skiprows=1)
    assert boundary.shape == (300, 3)
    manifest = json.loads(open(f"{prefix}_group.csv.manifest.json").read())
    assert manifest["command"] == "cells" and manifest["tool_version"]


def test_state_roundtrip_is_exact(tmp_path):
    for name in catalog.BUILTIN:
        psi = catalog.builtin_state(name)
        back = fio.state_from_dict(json.loads(fio.dumps_json(fio.state_to_dict(psi))))
        np.testing.assert_array_equal(back.amplitudes, psi.amplitudes)
        c = state_to_constellation(psi)
        c2 = fio.constellation_from_dict(json.loads(fio.dumps_json(fio.constellation_to_dict(c))))
        np.testing.assert_array_equal(c2.directions, c.directions)


def test_csv_floats_roundtrip():
    vals = [math.pi, 1 / 3, 1e-300, -2.5e17, 0.1]
    text = fio.to_csv(["v"], [[v] for v in vals])
    assert [float(r[0]) for r in list(csv.reader(text.splitlines()))[1:]] == vals


def test_entry_point_runs():
    res = subprocess.run([sys.executable, "-m", "topophase.cli", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip()
