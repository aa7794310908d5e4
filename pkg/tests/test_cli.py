"""Command line behaviour: exit codes, schemas, deterministic outputs."""

import json
from importlib import resources

import jsonschema
import numpy as np
import pytest

from hcmc.cli import canonical_json, main


def _schema(name: str) -> dict:
    text = resources.files("hcmc.schemas").joinpath(name).read_text()
    return json.loads(text)


def test_verify_h0_exit_zero(tmp_path, capsys):
    report = tmp_path / "rep.json"
    code = main(["verify", "--regime", "h0", "--report", str(report)])
    out = capsys.readouterr().out
    assert code == 0
    assert out.count("PASS") == 3
    doc = json.loads(report.read_text())
    jsonschema.validate(doc, _schema("verify_report.schema.json"))
    # canonical writer round-trips byte for byte
    assert canonical_json(json.loads(report.read_text())) == report.read_text()


def test_verify_reports_are_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["verify", "--regime", "h0", "--report", str(a)]) == 0
    assert main(["verify", "--regime", "h0", "--report", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_usage_error_exit_two():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--regime", "bogus"])
    assert exc.value.code == 2


def test_ode_equilibrium(tmp_path, capsys):
    out = tmp_path / "profile.txt"
    code = main(["ode", "--H", "1", "--phi0", "1", "--dphi0", "0",
                 "--range", "-1", "1", "--out", str(out)])
    assert code == 0
    data = np.loadtxt(out, skiprows=1)
    assert np.allclose(data[:, 1], 1.0, atol=1e-10)
    assert "stop_reason=completed" in capsys.readouterr().err


def test_ode_failure_exit_one(capsys):
    code = main(["ode", "--H", "0", "--phi0", "-1", "--range", "0", "1"])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_mc_summary_schema(tmp_path):
    table = tmp_path / "pts.txt"
    summary = tmp_path / "summary.json"
    code = main(["mc", "--family", "horosphere", "--m", "2",
                 "--grid", "5", "5", "--out", str(table),
                 "--summary", str(summary)])
    assert code == 0
    doc = json.loads(summary.read_text())
    jsonschema.validate(doc, _schema("mc_summary.schema.json"))
    assert doc["h_spread"] <= 1e-12
    rows = table.read_text().splitlines()
    assert rows[0] == "x y H"
    assert len(rows) == 26


def test_mc_table_input(tmp_path):
    xs = np.linspace(-0.6, 0.6, 41)
    table = np.column_stack([xs, np.full_like(xs, 2.0)])
    phi_t = tmp_path / "phi.txt"
    np.savetxt(phi_t, table)
    psi_t = tmp_path / "psi.txt"
    np.savetxt(psi_t, table)
    out = tmp_path / "h.txt"
    summary = tmp_path / "s.json"
    code = main(["mc", "--phi-table", str(phi_t), "--psi-table", str(psi_t),
                 "--grid", "4", "4", "--out", str(out), "--summary", str(summary)])
    assert code == 0
    doc = json.loads(summary.read_text())
    assert abs(doc["h_mean"] - 1.0) <= 1e-9  # constant tables: a horosphere


def test_mesh_gallery_obj(tmp_path, capsys):
    code = main(["mesh", "--gallery", "h0", "--out", str(tmp_path / "h0.obj")])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["meshes"][0]["max_h_deviation"] <= 1e-6
    lines = (tmp_path / "h0.obj").read_text().splitlines()
    assert lines[0].startswith("v ")
    zs = [float(l.split()[3]) for l in lines if l.startswith("v ")]
    assert min(zs) > 0
    faces = [l for l in lines if l.startswith("f ")]
    assert faces and all(len(l.split()) == 4 for l in faces)


def test_falsify_cli_table(tmp_path, capsys):
    report = tmp_path / "fals.json"
    code = main(["falsify", "--H0", "1", "--deltas", "0",
                 "--budget", "1200", "--restarts", "1",
                 "--seed", "5", "--report", str(report)])
    assert code == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "delta best_residual evaluations"
    doc = json.loads(report.read_text())
    jsonschema.validate(doc, _schema("falsify_report.schema.json"))
    assert canonical_json(json.loads(report.read_text())) == report.read_text()
