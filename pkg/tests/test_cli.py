import json

import numpy as np
import pytest

from conftest import R2L3_ALPHA, R2L3_SHAPES, R2L3_VOLUME
from twistloop import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    return code, json.loads(out), err


def test_solve_json(capsys):
    code, report, _ = run_json(capsys, "solve", "R2L3")
    assert code == 0
    assert report["word"] == "RRLLL" and report["rotation"] == 0 and report["n"] == 5
    shapes = np.array([complex(re, im) for re, im in report["shapes"]])
    assert np.max(np.abs(shapes - R2L3_SHAPES)) < 1e-4
    assert abs(report["volume"] - R2L3_VOLUME) < 1e-4
    assert report["residual"] < 1e-12


def test_solve_errors(capsys):
    code, out, err = run(capsys, "solve", "RRRR")
    assert code == 1 and "not hyperbolic" in err
    code, _out, err = run(capsys, "solve", "Q7")
    assert code == 1 and "error" in err
    code, _out, err = run(capsys, "solve", "RLRL")
    assert code == 1


def test_solve_text_and_csv(capsys):
    code, out, _ = run(capsys, "solve", "RLL")
    assert code == 0 and "volume:" in out
    code, out, _ = run(capsys, "solve", "RLL", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "key,value"
    assert any(line.startswith("volume,") for line in out.splitlines())


def test_solve_tolerance_flag(capsys):
    code, report, _ = run_json(capsys, "solve", "RLL", "--tol-newton", "1e-13")
    assert code == 0 and report["residual"] < 1e-13


def test_one_loop_command(capsys):
    code, report, _ = run_json(capsys, "one-loop", "R2L3")
    assert code == 0 and report["route"] == "A"
    coeffs = [complex(re, im) for re, im in report["tau_normalized"]["coefficients"]]
    assert report["tau_normalized"]["min_exp"] == 0
    expect = [1.0, -R2L3_ALPHA, R2L3_ALPHA, -1.0]
    assert max(abs(a - b) for a, b in zip(coeffs, expect)) < 1e-4
    assert report["tau_at_one"] < 1e-8


def test_alexander_command(capsys):
    code, report, _ = run_json(capsys, "alexander", "R2L3")
    assert code == 0 and report["route"] == "C"
    assert report["branch"] == [1, 1]
    assert report["fricke_deviation"] < 1e-10
    det_j = complex(*report["det_j"])
    assert abs(det_j - 1.0) < 1e-8


def test_big_jacobian_command(capsys):
    code, report, _ = run_json(capsys, "big-jacobian", "R2L3")
    assert code == 0 and report["route"] == "C-big"
    assert report["matrix_size"] == 8
    assert report["tau_at_one"] < 1e-8


def test_verify_pass_and_fail(capsys):
    code, report, _ = run_json(capsys, "verify", "R2L3")
    assert code == 0 and report["pass"] is True
    assert report["alignments"]["a_vs_cbig"]["relative_deviation"] < 1e-8
    assert report["alignments"]["a_vs_c"]["relative_deviation"] < 1e-8
    assert all(report["invariant_flags"].values())
    code, report, _ = run_json(capsys, "verify", "R2L3", "--tol-compare", "1e-20")
    assert code == 3 and report["pass"] is False


def test_verify_json_round_trip(capsys):
    code, out, _ = run(capsys, "verify", "RLL", "--format", "json")
    assert code == 0
    report = json.loads(out)
    assert json.loads(cli.render(report, "json")) == report


def test_verify_deterministic(capsys):
    _, out1, _ = run(capsys, "verify", "RRLRLL", "--format", "json")
    _, out2, _ = run(capsys, "verify", "RRLRLL", "--format", "json")
    assert out1 == out2


def test_verify_batch(tmp_path, capsys):
    batch = tmp_path / "words.txt"
    batch.write_text("# regression words\nR2L3\n\nRLL\nRRLRLL\n")
    code, report, _ = run_json(capsys, "verify-batch", str(batch))
    assert code == 0
    assert report["total"] == 3 and report["passed"] == 3 and report["pass"] is True
    assert [e["word"] for e in report["words"]] == ["RRLLL", "RLL", "RRLRLL"]


def test_verify_batch_bad_entries(tmp_path, capsys):
    batch = tmp_path / "words.txt"
    batch.write_text("RLL\nRRRR\n")
    code, report, _ = run_json(capsys, "verify-batch", str(batch))
    assert code == 1
    assert report["passed"] == 1
    assert "error" in report["words"][1]
    code, _out, err = run(capsys, "verify-batch", str(tmp_path / "missing.txt"))
    assert code == 1 and "cannot read" in err


def test_export_import_round_trip(tmp_path, capsys):
    path = tmp_path / "r2l3.json"
    code, out, _ = run(capsys, "export-general", "R2L3", "-o", str(path))
    assert code == 0 and str(path) in out
    code, general, _ = run_json(capsys, "general", str(path))
    assert code == 0
    code, direct, _ = run_json(capsys, "one-loop", "R2L3")
    assert general["tau"] == direct["tau"]
    assert general["warnings"] == []
    assert general["flattening"]["completeness_values"] == [0]


def test_export_stdout(capsys):
    code, out, _ = run(capsys, "export-general", "RLL")
    assert code == 0
    payload = json.loads(out)
    assert payload["n"] == 3 and len(payload["shapes"]) == 3


def test_general_validation_errors(tmp_path, capsys):
    path = tmp_path / "data.json"
    _, out, _ = run(capsys, "export-general", "RLL")
    payload = json.loads(out)
    capsys.readouterr()

    bad = dict(payload)
    bad["flattening"] = {"f": [0, 0, 0], "fp": [0, 0, 0], "fpp": [0, 0, 0]}
    path.write_text(json.dumps(bad))
    code, _out, err = run(capsys, "general", str(path))
    assert code == 1 and "vector-sum" in err

    path.write_text("not json")
    code, _out, err = run(capsys, "general", str(path))
    assert code == 1 and "JSON" in err

    del bad["g"]
    path.write_text(json.dumps(bad))
    code, _out, err = run(capsys, "general", str(path))
    assert code == 1

    code, _out, err = run(capsys, "general", str(tmp_path / "nope.json"))
    assert code == 1


def test_general_warns_on_bad_shapes(tmp_path, capsys):
    _, out, _ = run(capsys, "export-general", "RLL")
    payload = json.loads(out)
    capsys.readouterr()
    payload["shapes"][0][0] += 1e-3
    path = tmp_path / "perturbed.json"
    path.write_text(json.dumps(payload))
    code, report, _ = run_json(capsys, "general", str(path))
    assert code == 0
    assert report["warnings"] == ["shapes fail gluing residual check"]
    assert report["tau"]["coefficients"]


def test_seed_and_radius_flags(capsys):
    code, a, _ = run_json(capsys, "solve", "RRLRLL", "--seed", "5", "--radius", "0.2")
    assert code == 0
    code, b, _ = run_json(capsys, "solve", "RRLRLL", "--seed", "5", "--radius", "0.2")
    assert a == b
