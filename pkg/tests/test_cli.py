import csv
import io
import json
import subprocess
import sys

import pytest

from monometric.cli import SCAN_HEADER, main

HEINZ = '{"family":"heinz","params":{"alpha":0.25}}'
EXTREME0 = '{"family":"extreme","params":{"nu":0.0}}'


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_families(capsys):
    code, out, _ = run(capsys, "families")
    assert code == 0
    data = json.loads(out)
    assert data["schema_version"] == 1
    assert data["families"]["wyd"] == [{"name": "p", "min": -1.0, "max": 2.0}]


def test_eval_list_and_range(capsys):
    code, out, _ = run(capsys, "eval", "--kernel", '{"family":"extreme","params":{"nu":1.0}}', "--x", "1,3")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["x", "k"]
    assert [float(r[1]) for r in rows[1:]] == pytest.approx([1.0, 0.5])
    code, out, _ = run(capsys, "eval", "--kernel", HEINZ, "--x", "0.5:2:0.5", "--which", "g")
    assert code == 0 and len(out.splitlines()) == 5


def test_eval_rejects_nonpositive_points(capsys):
    code, _, err = run(capsys, "eval", "--kernel", HEINZ, "--x", "0,1")
    assert code == 2 and "positive" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["cp-test"],
        ["cp-test", "--kernel", "{not json"],
        ["cp-test", "--kernel", '{"family":"nope","params":{}}'],
        ["cp-test", "--kernel", '{"family":"wyd","params":{"p":3}}'],
        ["scan", "--family", "nope", "--grid", "0,1"],
        ["scan", "--family", "heinz", "--grid", "1:0:0.1"],
        ["critical", "--family", "hansen_bridge", "--range", "0.2,0.8"],
        ["critical", "--family", "convex_combo", "--fixed", '{"nu":0.25}', "--range", "0.1,0.3"],
        ["ft-verify", "--beta", "0.5"],
        ["channel-bench", "--d", "2", "--env", "5"],
        ["bogus-command"],
        ["verify", "--suite", "nope"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "usage error" in err


def test_cp_test_report(capsys):
    code, out, _ = run(capsys, "cp-test", "--kernel", HEINZ)
    assert code == 0
    data = json.loads(out)
    assert data["verdict"] == "positive_definite"
    assert data["predicted_in_K_plus"] is True and data["agreement"] == "match"


def test_order_test_report(capsys):
    code, out, _ = run(capsys, "order-test", "--kernel", '{"family":"extreme","params":{"nu":0.5}}', "--kernel2", EXTREME0)
    assert code == 0
    assert json.loads(out)["verdict"] == "not_positive_definite"


def test_membership_report(capsys):
    code, out, _ = run(capsys, "membership", "--kernel", EXTREME0)
    assert code == 0
    data = json.loads(out)
    assert data["label"] == "in_K_minus"
    assert data["agreement"] == {"in_K_plus": "match", "in_K_minus": "match"}


def test_scan_csv(capsys, tmp_path):
    out_path = tmp_path / "scan.csv"
    code, out, _ = run(capsys, "scan", "--family", "convex_combo", "--fixed", '{"nu":0.25}', "--param", "lam",
                       "--grid", "0.3,0.6", "--out", str(out_path))
    assert code == 0 and out == ""
    rows = list(csv.reader(out_path.open()))
    assert rows[0] == SCAN_HEADER
    assert [r[3] for r in rows[1:]] == ["positive_definite", "not_positive_definite"]
    assert [r[6] for r in rows[1:]] == ["match", "match"]


def test_scan_negative_grid_and_order_mode(capsys):
    code, out, _ = run(capsys, "scan", "--family", "binomial", "--grid=-0.5:0.5:0.5", "--test", "order-vs",
                       "--against", '{"family":"binomial","params":{"alpha":-1.0}}')
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert [float(r[2]) for r in rows[1:]] == [-0.5, 0.0, 0.5]
    assert all(r[3] == "positive_definite" for r in rows[1:])


def test_critical(capsys):
    code, out, _ = run(capsys, "critical", "--family", "convex_combo", "--fixed", '{"nu":0.25}',
                       "--range", "0.1,0.9", "--width", "1e-3")
    assert code == 0
    data = json.loads(out)
    assert abs(data["estimate"] - 4 / 9) <= 1e-3
    assert data["converged"] is True


def test_critical_override_is_recorded(capsys):
    code, out, _ = run(capsys, "critical", "--family", "hansen_bridge", "--range", "0.2,0.45",
                       "--width", "0.02", "--override-monotonicity")
    data = json.loads(out)
    assert "ASSUMED" in data["assumption"]


def test_ft_verify(capsys):
    code, out, _ = run(capsys, "ft-verify", "--alpha", "0.5", "--beta", "3", "--grid=-2:2:1")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["s", "closed_form", "quadrature", "abs_error"]
    assert max(float(r[3]) for r in rows[1:]) <= 1e-7


def test_channel_bench(capsys):
    code, out, _ = run(capsys, "channel-bench", "--d", "2", "--env", "2", "--samples", "3", "--starts", "3",
                       "--audits", "10")
    assert code == 0
    data = json.loads(out)
    assert data["audit_violations"] == 0 and data["audits"] == 10
    assert 0.0 <= data["eta"]["eta_riem_sup"] <= 1.0 + 1e-8


def test_verify_closed_forms_suite(capsys):
    code, out, err = run(capsys, "verify", "--suite", "closed-forms")
    assert code == 0
    data = json.loads(out)
    assert data["failed_criteria"] == []
    assert {c["number"] for c in data["criteria"]} == {4, 5}
    assert "criterion 4" in err


def test_verify_fault_injection_names_symmetry(capsys):
    code, out, err = run(capsys, "verify", "--suite", "kernels", "--inject-fault", "symmetry")
    assert code == 1
    data = json.loads(out)
    assert data["failed_criteria"] == ["1: family membership table"]
    assert "symmetry" in err


def test_outputs_are_byte_identical(tmp_path):
    def invoke(name):
        path = tmp_path / name
        subprocess.run([sys.executable, "-m", "monometric", "verify", "--suite", "closed-forms", "--seed", "3",
                        "--out", str(path)], check=True, capture_output=True)
        return path.read_bytes()

    assert invoke("a.json") == invoke("b.json")
    first = subprocess.run([sys.executable, "-m", "monometric", "scan", "--family", "heinz", "--grid", "0.1,0.6"],
                           check=True, capture_output=True).stdout
    second = subprocess.run([sys.executable, "-m", "monometric", "scan", "--family", "heinz", "--grid", "0.1,0.6"],
                            check=True, capture_output=True).stdout
    assert first == second


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"tolerance": 1e-9}))
    code, _, err = run(capsys, "cp-test", "--kernel", HEINZ, "--config", str(tmp_path / "missing.json"))
    assert code == 2 and "--config" in err
    code, _, _ = run(capsys, "cp-test", "--kernel", HEINZ, "--config", str(cfg))
    assert code == 0


def test_numerical_rejection_exit_3(capsys, monkeypatch):
    from monometric import cli
    from monometric.linalg_core import NumericalRejection

    def boom(*_a, **_k):
        raise NumericalRejection("base is not strictly positive")

    monkeypatch.setattr(cli, "cp_test", boom)
    code, _, err = run(capsys, "cp-test", "--kernel", HEINZ)
    assert code == 3 and "numerical rejection" in err
