import json
import os

import numpy as np
import pytest

from framelab import ConfigInvalid, DenseMatrix, Frame
from framelab.cli import main, validate


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out.strip()
    return code, json.loads(out.splitlines()[-1])


# ---------------------------------------------------------------------------
# config validation
# ---------------------------------------------------------------------------

def test_validate_missing_seed_names_field():
    with pytest.raises(ConfigInvalid) as exc:
        validate({"command": "erasure", "output": "x.csv",
                  "params": {"frame": "f.json", "trials": 10}})
    assert exc.value.field == "seed"


def test_validate_keep_prob_open_interval():
    with pytest.raises(ConfigInvalid) as exc:
        validate({"command": "erasure", "seed": 1, "output": "x.csv",
                  "params": {"frame": "f.json", "trials": 10, "keep_prob": 0.0}})
    assert exc.value.field == "params.keep_prob"


def test_validate_unknown_key_named():
    with pytest.raises(ConfigInvalid) as exc:
        validate({"command": "stirling", "params": {"bogus": 1}})
    assert exc.value.field == "params.bogus"
    with pytest.raises(ConfigInvalid) as exc:
        validate({"command": "stirling", "wrong": 2})
    assert exc.value.field == "wrong"


def test_validate_fills_defaults():
    cfg = validate({"command": "erasure", "seed": 5, "output": "x.csv",
                    "params": {"frame": "f.json", "trials": 10}})
    assert cfg.params["keep_prob"] == 0.5
    assert cfg.echo()["params"]["keep_prob"] == 0.5


def test_validate_unknown_command():
    with pytest.raises(ConfigInvalid):
        validate({"command": "iterate"})


def test_validate_type_errors():
    with pytest.raises(ConfigInvalid) as exc:
        validate({"command": "stirling", "params": {"m_max": "many"}})
    assert exc.value.field == "params.m_max"


def test_validate_probe_distribution():
    with pytest.raises(ConfigInvalid) as exc:
        validate({"command": "probe", "seed": 0, "output": "x.json",
                  "params": {"n": 4, "trials": 5, "dist": "gaussian"}})
    assert exc.value.field == "params.dist"


# ---------------------------------------------------------------------------
# end-to-end commands
# ---------------------------------------------------------------------------

def test_construct_rerun_byte_identical(tmp_path, capsys):
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    code, _ = run_cli(capsys, "construct", "--kind", "etf", "--N", "7", "--M", "3",
                      "--out", str(out1))
    assert code == 0
    code, manifest = run_cli(capsys, "construct", "--kind", "etf", "--N", "7",
                             "--M", "3", "--out", str(out2))
    assert code == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert manifest["outputs"][str(out2)]
    f = Frame.from_json_dict(json.loads(out1.read_text()))
    assert (f.n, f.M, f.kind) == (3, 7, "etf")


def test_erasure_rerun_byte_identical(tmp_path, capsys):
    frame_path = tmp_path / "f.json"
    run_cli(capsys, "construct", "--kind", "harmonic", "--n", "4", "--M", "16",
            "--out", str(frame_path))
    csv1, csv2 = tmp_path / "a.csv", tmp_path / "b.csv"
    code, _ = run_cli(capsys, "erasure", "--frame", str(frame_path),
                      "--trials", "200", "--seed", "42", "--csv", str(csv1))
    assert code == 0
    run_cli(capsys, "erasure", "--frame", str(frame_path),
            "--trials", "200", "--seed", "42", "--csv", str(csv2))
    assert csv1.read_bytes() == csv2.read_bytes()
    header = csv1.read_text().splitlines()[0]
    assert header == "n,M,keep_prob,trials,mean_error,stderr,epsilon,input_norm,ratio,seed"


def test_sweep_csv_rows(tmp_path, capsys):
    csv = tmp_path / "sweep.csv"
    code, _ = run_cli(capsys, "sweep", "--n", "4", "--M-list", "8,16,32",
                      "--trials", "100", "--seed", "7", "--csv", str(csv))
    assert code == 0
    lines = csv.read_text().splitlines()
    assert len(lines) == 4
    ms = [int(line.split(",")[1]) for line in lines[1:]]
    assert ms == [8, 16, 32]


def test_ner_certificate_subset_count(tmp_path, capsys):
    frame_path = tmp_path / "etf.json"
    run_cli(capsys, "construct", "--kind", "etf", "--N", "7", "--M", "3",
            "--out", str(frame_path))
    cert_path = tmp_path / "cert.json"
    code, manifest = run_cli(capsys, "ner", "--frame", str(frame_path), "--K", "5",
                             "--mode", "exhaustive", "--json", str(cert_path))
    assert code == 0
    doc = json.loads(cert_path.read_text())
    assert doc["certificate"]["subsets_examined"] == 21
    assert doc["certificate"]["worst_cond"] <= 2.1076
    assert manifest["result"]["certificate"]["K"] == 5


def test_ner_with_certification_threshold(tmp_path, capsys):
    frame_path = tmp_path / "etf.json"
    run_cli(capsys, "construct", "--kind", "etf", "--N", "7", "--M", "3",
            "--out", str(frame_path))
    cert_path = tmp_path / "cert.json"
    code, _ = run_cli(capsys, "ner", "--frame", str(frame_path), "--K", "5",
                      "--C", "2.1076", "--json", str(cert_path))
    assert code == 0
    assert json.loads(cert_path.read_text())["passed"] is True


def test_rudelson_inline_result(tmp_path, capsys):
    frame_path = tmp_path / "f.json"
    run_cli(capsys, "construct", "--kind", "harmonic", "--n", "4", "--M", "16",
            "--out", str(frame_path))
    code, manifest = run_cli(capsys, "rudelson", "--frame", str(frame_path),
                             "--trials", "200", "--seed", "3")
    assert code == 0
    assert manifest["result"]["ratio"] <= 4.0
    assert manifest["result"]["trials"] == 200


def test_khintchine_exact_inline(capsys):
    code, manifest = run_cli(capsys, "khintchine", "--m", "2", "--count", "6",
                             "--dim", "5", "--seed", "1", "--exact")
    assert code == 0
    assert manifest["result"]["exact"] is True
    assert manifest["result"]["ratio"] <= 1.0


def test_probe_roundtrip_document(tmp_path, capsys):
    out = tmp_path / "probe.json"
    code, _ = run_cli(capsys, "probe", "--n", "9", "--trials", "150",
                      "--seed", "4", "--json", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["isometry"]["passed"] is True
    assert doc["roundtrip"]["rel_error"] <= 1e-10
    assert doc["concentration"]["ratio"] <= 4.0


def test_probe_lambda_file(tmp_path, capsys):
    lam_path = tmp_path / "lam.json"
    lam_path.write_text(json.dumps([0.5, -0.25, 1.0]))
    out = tmp_path / "probe.json"
    code, _ = run_cli(capsys, "probe", "--n", "3", "--trials", "10", "--seed", "0",
                      "--lambda-file", str(lam_path), "--json", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["roundtrip"]["lambda"] == [0.5, -0.25, 1.0]


def test_probe_family_file(tmp_path, capsys):
    import framelab
    fam = framelab.circulant_dictionary(3)
    fam_path = tmp_path / "family.json"
    fam_path.write_text(json.dumps([DenseMatrix(m).to_json_dict() for m in fam]))
    out = tmp_path / "probe.json"
    code, _ = run_cli(capsys, "probe", "--n", "3", "--family", "file",
                      "--family-file", str(fam_path), "--trials", "20",
                      "--seed", "0", "--json", str(out))
    assert code == 0
    assert json.loads(out.read_text())["isometry"]["passed"] is True


def test_stirling_all_hold(capsys):
    code, manifest = run_cli(capsys, "stirling")
    assert code == 0
    assert manifest["result"]["all_hold"] is True
    assert manifest["result"]["m_max"] == 150


def test_manifest_digest_matches_file(tmp_path, capsys):
    import hashlib
    out = tmp_path / "f.json"
    code, manifest = run_cli(capsys, "construct", "--kind", "scaled-onb",
                             "--n", "3", "--out", str(out))
    assert code == 0
    assert manifest["outputs"][str(out)] == hashlib.sha256(out.read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# exit codes and failure behavior
# ---------------------------------------------------------------------------

def test_missing_seed_exits_2(tmp_path, capsys):
    code, doc = run_cli(capsys, "erasure", "--frame", "f.json",
                        "--trials", "10", "--csv", str(tmp_path / "x.csv"))
    assert code == 2
    assert doc["error"] == "ConfigInvalid"
    assert doc["field"] == "seed"


def test_numerical_error_exits_3(tmp_path, capsys):
    # a frame with duplicated columns fails exhaustive scanning rank-deficient
    dup = Frame(n=2, M=3,
                vectors=DenseMatrix(np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])),
                normalization="unit")
    frame_path = tmp_path / "dup.json"
    frame_path.write_text(json.dumps(dup.to_json_dict()))
    code, doc = run_cli(capsys, "ner", "--frame", str(frame_path), "--K", "2",
                        "--json", str(tmp_path / "cert.json"))
    assert code == 3
    assert doc["error"] == "RankDeficient"


def test_infeasible_etf_exits_3(tmp_path, capsys):
    code, doc = run_cli(capsys, "construct", "--kind", "etf", "--N", "7", "--M", "4",
                        "--out", str(tmp_path / "x.json"))
    assert code == 3
    assert doc["error"] == "NoSuchSet"


def test_failed_run_leaves_no_output(tmp_path, capsys):
    target = tmp_path / "cert.json"
    code, _ = run_cli(capsys, "ner", "--frame", str(tmp_path / "missing.json"),
                      "--K", "5", "--json", str(target))
    assert code == 2
    assert not target.exists()
    assert not [p for p in os.listdir(tmp_path) if p.startswith(".framelab-")]


def test_unknown_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["stirling", "--bogus", "1"])
    assert exc.value.code == 2


# ---------------------------------------------------------------------------
# config file layering
# ---------------------------------------------------------------------------

def test_config_file_with_flag_override(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({
        "command": "sweep",
        "seed": 9,
        "params": {"n": 4, "M_list": [8, 16], "trials": 50},
        "output": str(tmp_path / "a.csv"),
    }))
    code, manifest = run_cli(capsys, "sweep", "--config", str(cfg_path))
    assert code == 0
    assert manifest["config"]["params"]["trials"] == 50
    # flags override the config file
    code, manifest = run_cli(capsys, "sweep", "--config", str(cfg_path),
                             "--trials", "60", "--csv", str(tmp_path / "b.csv"))
    assert code == 0
    assert manifest["config"]["params"]["trials"] == 60
    assert manifest["config"]["seed"] == 9


def test_config_file_wrong_command(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"command": "sweep", "seed": 1}))
    code, doc = run_cli(capsys, "stirling", "--config", str(cfg_path))
    assert code == 2
    assert doc["error"] == "ConfigInvalid"


def test_config_file_unknown_key(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"command": "stirling", "seed": 1, "extra": 2}))
    code, doc = run_cli(capsys, "stirling", "--config", str(cfg_path))
    assert code == 2


def test_manifest_carries_version_and_duration(capsys):
    code, manifest = run_cli(capsys, "stirling", "--m-max", "10")
    assert code == 0
    assert manifest["version"]
    assert manifest["duration_seconds"] >= 0.0
    assert manifest["outputs"] == {}
