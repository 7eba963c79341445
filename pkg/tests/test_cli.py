"""End-to-end tests of the command line interface (in-process via main)."""

import json

import numpy as np
import pytest

from qsde_elim import catalog
from qsde_elim.cli import main, model_to_document, parse_model_document, read_model_file


def write_json(path, doc):
    path.write_text(json.dumps(doc, indent=2) + "\n")
    return str(path)


def two_level_doc(alpha=0.5):
    return {
        "schema_version": 1,
        "builtin": {
            "name": "two_level",
            "parameters": {"delta": 1.0, "gamma": 1.0, "alpha": alpha},
        },
    }


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# parse and validation failures (exit 1)


def test_missing_model_file(tmp_path, capsys):
    code, _, err = run(capsys, ["check", "--model", str(tmp_path / "nope.json")])
    assert code == 1
    assert "cannot read model file" in err


def test_invalid_json(tmp_path, capsys):
    path = tmp_path / "m.json"
    path.write_text("{not json")
    code, _, err = run(capsys, ["check", "--model", str(path)])
    assert code == 1
    assert "invalid JSON at line" in err


def test_unknown_top_level_field(tmp_path, capsys):
    doc = two_level_doc()
    doc["bogus"] = 1
    path = write_json(tmp_path / "m.json", doc)
    code, _, err = run(capsys, ["check", "--model", path])
    assert code == 1
    assert "unknown field" in err and "bogus" in err


def test_builtin_and_explicit_are_exclusive(tmp_path, capsys):
    doc = two_level_doc()
    doc["explicit"] = {}
    path = write_json(tmp_path / "m.json", doc)
    code, _, err = run(capsys, ["check", "--model", path])
    assert code == 1
    assert "exactly one of" in err

    path = write_json(tmp_path / "m2.json", {"schema_version": 1})
    code, _, err = run(capsys, ["check", "--model", path])
    assert code == 1
    assert "exactly one of" in err


def test_unsupported_schema_version(tmp_path, capsys):
    doc = two_level_doc()
    doc["schema_version"] = 2
    path = write_json(tmp_path / "m.json", doc)
    code, _, err = run(capsys, ["check", "--model", path])
    assert code == 1
    assert "unsupported schema_version" in err


def test_missing_builtin_parameter(tmp_path, capsys):
    doc = two_level_doc()
    del doc["builtin"]["parameters"]["alpha"]
    path = write_json(tmp_path / "m.json", doc)
    code, _, err = run(capsys, ["check", "--model", path])
    assert code == 1
    assert "alpha" in err


def test_unknown_builtin_name(tmp_path, capsys):
    doc = {"schema_version": 1, "builtin": {"name": "teleporter", "parameters": {}}}
    path = write_json(tmp_path / "m.json", doc)
    code, _, err = run(capsys, ["check", "--model", path])
    assert code == 1
    assert "unknown builtin" in err


def test_wrong_matrix_length_names_the_field(tmp_path, capsys):
    doc = model_to_document(catalog.two_level_atom(1.0, 1.0, 0.5))
    doc["explicit"]["Y"] = [[0.0, 0.0]] * 3
    path = write_json(tmp_path / "m.json", doc)
    code, _, err = run(capsys, ["check", "--model", path])
    assert code == 1
    assert "explicit.Y" in err and "4" in err


def test_bad_ks_flag(tmp_path, capsys):
    path = write_json(tmp_path / "m.json", two_level_doc())
    code, _, err = run(capsys, ["converge", "--model", path, "--ks", "1,abc"])
    assert code == 1
    assert "--ks" in err


def test_config_unknown_key(tmp_path, capsys):
    mpath = write_json(tmp_path / "m.json", two_level_doc())
    cpath = write_json(tmp_path / "c.json", {"stepss": 11})
    code, _, err = run(capsys, ["converge", "--model", mpath, "--config", cpath])
    assert code == 1
    assert "config" in err and "stepss" in err


# ---------------------------------------------------------------------------
# check


def test_check_builtin_two_level(tmp_path, capsys):
    path = write_json(tmp_path / "m.json", two_level_doc())
    code, out, _ = run(capsys, ["check", "--model", path])
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"] is True
    assert doc["ground_rank"] == 1
    names = [s["name"] for s in doc["sections"]]
    assert names == [
        "unitarity (k=1)",
        "scaling-consistency",
        "inverse-structure",
        "ground-support",
        "limit-unitarity",
    ]
    assert all(s["passed"] for s in doc["sections"])


def test_check_builtin_catalog_family(tmp_path, capsys):
    docs = [
        {
            "schema_version": 1,
            "builtin": {
                "name": "alkali",
                "parameters": {"delta": 1.0, "gamma": 1.0, "bx": 0.2, "by": 0.0, "bz": 0.4},
            },
        },
        {
            "schema_version": 1,
            "builtin": {"name": "cavity_system", "parameters": {"gamma": 1.0, "n_trunc": 3}},
        },
        {
            "schema_version": 1,
            "builtin": {
                "name": "lambda_system",
                "parameters": {"gamma": 1.0, "g": 2.0, "alpha": [0.4, 0.0], "n_trunc": 3},
            },
        },
    ]
    for i, doc in enumerate(docs):
        path = write_json(tmp_path / f"m{i}.json", doc)
        code, out, _ = run(capsys, ["check", "--model", path])
        assert code == 0, out
        assert json.loads(out)["passed"] is True


def test_check_structural_violation_exits_2(tmp_path, capsys):
    # sigma_x coupling drags the ground sector along: F_0 P0 != 0
    p = catalog.pauli_ops()
    m = catalog.two_level_atom(1.0, 1.0, 0.5)
    from qsde_elim import ScaledModel

    bad = ScaledModel(Y=m.Y, A=m.A, B=m.B, F=[p.sigma_x], G=m.G, W=m.W)
    path = write_json(tmp_path / "bad.json", model_to_document(bad))
    code, out, _ = run(capsys, ["check", "--model", path])
    assert code == 2
    doc = json.loads(out)
    assert doc["passed"] is False
    inv = next(s for s in doc["sections"] if s["name"] == "inverse-structure")
    assert not inv["passed"]
    offending = [r for r in inv["residuals"] if "F_0" in r["identity"] and r["residual"] > 0.5]
    assert offending


def test_check_singular_restriction_suggests_override(tmp_path, capsys):
    # nilpotent Y: kernel projector exists but the restricted block is singular
    z = [[0.0, 0.0]] * 4
    doc = {
        "schema_version": 1,
        "explicit": {
            "dim": 2,
            "channels": 1,
            "Y": [[0.0, 0.0], [1.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
            "A": z,
            "B": z,
            "F": [z],
            "G": [z],
            "W": [[[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]]],
        },
    }
    path = write_json(tmp_path / "m.json", doc)
    code, out, _ = run(capsys, ["check", "--model", path])
    assert code == 2
    report = json.loads(out)
    assert report["passed"] is False
    assert "y1inv_override" in report["error"]
    # supplying an override lets the checks run; they then fail honestly
    doc["explicit"]["y1inv_override"] = z
    path = write_json(tmp_path / "m2.json", doc)
    code, out, _ = run(capsys, ["check", "--model", path])
    assert code == 2
    report = json.loads(out)
    names = [s["name"] for s in report["sections"]]
    assert "inverse-structure" in names


def test_check_accepts_correct_override(tmp_path, capsys):
    doc = model_to_document(
        catalog.two_level_atom(1.0, 1.0, 0.5), np.diag([-0.4 + 0.8j, 0.0])
    )
    path = write_json(tmp_path / "m.json", doc)
    code, out, _ = run(capsys, ["check", "--model", path])
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_check_report_to_file(tmp_path, capsys):
    mpath = write_json(tmp_path / "m.json", two_level_doc())
    out_path = tmp_path / "report.json"
    code, out, _ = run(capsys, ["check", "--model", mpath, "--out", str(out_path)])
    assert code == 0
    assert out == ""
    assert json.loads(out_path.read_text())["passed"] is True


# ---------------------------------------------------------------------------
# eliminate


def test_eliminate_writes_limit_and_report(tmp_path, capsys):
    mpath = write_json(tmp_path / "m.json", two_level_doc())
    out_path = tmp_path / "limit.json"
    code, _, _ = run(capsys, ["eliminate", "--model", mpath, "--out", str(out_path)])
    assert code == 0
    limit_doc = json.loads(out_path.read_text())
    # limit family: Y = A = F = 0, B = K, G = L, W = S
    assert limit_doc["explicit"]["Y"] == [[0.0, 0.0]] * 4
    B = limit_doc["explicit"]["B"]
    np.testing.assert_allclose(B[0], [0.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(B[3], [-0.1, 0.2], atol=1e-12)
    report = json.loads((tmp_path / "limit.json.report.json").read_text())
    assert report["passed"] is True
    assert report["ground_rank"] == 1
    np.testing.assert_allclose(report["p0"][3], [1.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(report["y1inv"][0], [-0.4, 0.8], atol=1e-12)


def test_eliminate_roundtrip_is_bit_identical(tmp_path, capsys):
    mpath = write_json(tmp_path / "m.json", two_level_doc())
    out_path = tmp_path / "limit.json"
    run(capsys, ["eliminate", "--model", mpath, "--out", str(out_path)])
    text = out_path.read_text()
    mf = read_model_file(out_path)  # schema validation of the emitted file
    again = json.dumps(model_to_document(mf.model), indent=2, sort_keys=False) + "\n"
    assert again == text


def test_eliminate_stdout_combined_document(tmp_path, capsys):
    mpath = write_json(tmp_path / "m.json", two_level_doc())
    code, out, _ = run(capsys, ["eliminate", "--model", mpath])
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"limit_model", "report"}
    assert doc["report"]["passed"] is True


def test_eliminate_singular_restriction(tmp_path, capsys):
    z = [[0.0, 0.0]] * 4
    doc = {
        "schema_version": 1,
        "explicit": {
            "dim": 2,
            "channels": 1,
            "Y": [[0.0, 0.0], [1.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
            "A": z,
            "B": z,
            "F": [z],
            "G": [z],
            "W": [[[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]]],
        },
    }
    path = write_json(tmp_path / "m.json", doc)
    code, _, err = run(capsys, ["eliminate", "--model", path, "--out", str(tmp_path / "o.json")])
    assert code == 2
    assert "y1inv_override" in err


def test_recheck_of_emitted_limit_fails_identity_closure(tmp_path, capsys):
    # the emitted limit scatters within the ground sector only, so its
    # unitarity closes on P0, not on the identity: plain check says no
    mpath = write_json(tmp_path / "m.json", two_level_doc())
    out_path = tmp_path / "limit.json"
    run(capsys, ["eliminate", "--model", mpath, "--out", str(out_path)])
    code, out, _ = run(capsys, ["check", "--model", str(out_path)])
    assert code == 2
    doc = json.loads(out)
    unit = next(s for s in doc["sections"] if s["name"] == "unitarity (k=1)")
    assert not unit["passed"]


# ---------------------------------------------------------------------------
# converge


def test_converge_csv_shape_and_zero_start(tmp_path, capsys):
    mpath = write_json(tmp_path / "m.json", two_level_doc())
    code, out, _ = run(
        capsys,
        ["converge", "--model", mpath, "--ks", "2,10,50", "--steps", "11", "--horizon", "1.0"],
    )
    assert code == 0
    blocks = out.split("\n\n")
    assert len(blocks) == 2
    lines = blocks[0].splitlines()
    assert lines[0] == "k,t,distance"
    assert len(lines) == 1 + 3 * 11
    for line in lines[1:]:
        k, t, dist = (float(x) for x in line.split(","))
        assert dist >= 0.0
        if t == 0.0:
            assert dist == 0.0
    sup_lines = blocks[1].splitlines()
    assert sup_lines[0] == "k,sup_distance"
    sups = {float(r.split(",")[0]): float(r.split(",")[1]) for r in sup_lines[1:]}
    assert sups[50.0] < sups[10.0] < sups[2.0]


def test_converge_json_format(tmp_path, capsys):
    mpath = write_json(tmp_path / "m.json", two_level_doc())
    code, out, _ = run(
        capsys,
        ["converge", "--model", mpath, "--ks", "5,25", "--steps", "6", "--format", "json"],
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["ks"] == [5.0, 25.0]
    assert len(doc["t_grid"]) == 6
    assert len(doc["distances"]) == 2 and len(doc["distances"][0]) == 6
    assert doc["max_clamp"] < 1e-8


def test_converge_zero_coupling_allowed(tmp_path, capsys):
    mpath = write_json(tmp_path / "m.json", two_level_doc())
    code, out, _ = run(capsys, ["converge", "--model", mpath, "--ks", "0", "--steps", "5"])
    assert code == 0
    assert out.splitlines()[0] == "k,t,distance"


def test_converge_config_drive_and_flag_override(tmp_path, capsys):
    mpath = write_json(tmp_path / "m.json", two_level_doc())
    cfg = {
        "ks": [3.0, 7.0],
        "steps": 21,
        "horizon": 0.5,
        "drive": {"breakpoints": [0.0, 0.25, 0.5], "amplitudes": [[0.3], [[0.0, -0.2]]]},
    }
    cpath = write_json(tmp_path / "c.json", cfg)
    code, out, _ = run(
        capsys, ["converge", "--model", mpath, "--config", cpath, "--ks", "5"]
    )
    assert code == 0
    lines = out.split("\n\n")[0].splitlines()
    rows = [line.split(",") for line in lines[1:]]
    assert {r[0] for r in rows} == {"5.0"}  # --ks wins over the config list
    assert len(rows) == 21  # config steps respected
    assert max(float(r[1]) for r in rows) == pytest.approx(0.5)  # config horizon


def test_converge_to_file_is_deterministic(tmp_path, capsys):
    mpath = write_json(tmp_path / "m.json", two_level_doc())
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(capsys, ["converge", "--model", mpath, "--ks", "1,10", "--steps", "21", "--out", str(a)])
    run(capsys, ["converge", "--model", mpath, "--ks", "1,10", "--steps", "21", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


# ---------------------------------------------------------------------------
# kurtz


def test_kurtz_csv_default_couplings_and_slope(tmp_path, capsys):
    mpath = write_json(tmp_path / "m.json", two_level_doc())
    code, out, _ = run(capsys, ["kurtz", "--model", mpath])
    assert code == 0
    blocks = out.split("\n\n")
    lines = blocks[0].splitlines()
    assert lines[0] == "label,k,corrected,uncorrected"
    rows = [line.split(",") for line in lines[1:]]
    p0_rows = [r for r in rows if r[0] == "P0"]
    assert [float(r[1]) for r in p0_rows] == [10.0, 30.0, 100.0, 300.0]
    for r in p0_rows:
        assert float(r[2]) < float(r[3])  # corrected beats uncorrected
    slope_lines = blocks[1].splitlines()
    assert slope_lines[0] == "label,slope"
    slopes = {r.split(",")[0]: float(r.split(",")[1]) for r in slope_lines[1:]}
    assert slopes["P0"] == pytest.approx(-1.0, abs=0.1)


def test_kurtz_json_reports_null_slope_for_flat_residuals(tmp_path, capsys):
    doc = {
        "schema_version": 1,
        "builtin": {
            "name": "alkali",
            "parameters": {"delta": 1.0, "gamma": 1.0, "bx": 0.2, "by": 0.0, "bz": 0.4},
        },
    }
    mpath = write_json(tmp_path / "m.json", doc)
    code, out, _ = run(capsys, ["kurtz", "--model", mpath, "--format", "json", "--ks", "10,100"])
    assert code == 0
    report = json.loads(out)
    p0_slope = next(s for s in report["slopes"] if s["label"] == "P0")
    assert p0_slope["slope"] is None


# ---------------------------------------------------------------------------
# document serialization helpers


def test_model_document_roundtrip_explicit():
    m = catalog.lambda_system(1.0, 2.0, 0.4, 3)
    doc = model_to_document(m)
    mf = parse_model_document(doc)
    np.testing.assert_allclose(mf.model.Y, m.Y, atol=0)
    np.testing.assert_allclose(mf.model.W, m.W, atol=0)
    assert mf.y1inv_override is None
    assert mf.label == "explicit"


def test_complex_scalar_forms():
    doc = two_level_doc(alpha=[0.3, -0.7])
    mf = parse_model_document(doc)
    expected = catalog.two_level_atom(1.0, 1.0, 0.3 - 0.7j)
    np.testing.assert_allclose(mf.model.A, expected.A, atol=0)
