import io
import json
import subprocess
import sys
from importlib import resources

import pytest

from coopbounds.cli import EXIT_CAP, EXIT_FAIL, EXIT_OK, EXIT_USAGE, run

DATA = resources.files("coopbounds") / "data"


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def test_eval_tight_instance():
    code, text = call("eval", "--mechanism", "dr", "--instance", str(DATA / "tight_M3.json"))
    assert code == EXIT_OK
    payload = json.loads(text)
    assert payload["ratio"] == "6/11" and payload["opt"] == "3"


def test_eval_ur_tight_instance():
    code, text = call("eval", "--mechanism", "ur", "--instance", str(DATA / "tight_ur_M3.json"))
    assert code == EXIT_OK and json.loads(text)["ratio"] == "1/3"


def test_eval_bad_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"M": 2, "buyer": [1], "seller": [1, 2]}')
    assert call("eval", "--mechanism", "ur", "--instance", str(bad))[0] == EXIT_USAGE
    assert call("eval", "--mechanism", "ur", "--instance", str(tmp_path / "missing.json"))[0] == EXIT_USAGE
    assert "cannot read instance" in capsys.readouterr().err


def test_unknown_mechanism_and_bad_args():
    assert call("eval", "--mechanism", "vcg", "--instance", str(DATA / "tight_M3.json"))[0] == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        call("verify-bound", "--family", "additive", "--M", "2")
    assert exc.value.code == EXIT_USAGE
    assert call("verify-bound", "--family", "general", "--M", "2", "--L", "10")[0] == EXIT_USAGE


def test_ratio_is_deterministic_given_seed():
    argv = ("ratio", "--mechanism", "ur", "--M", "3", "--trials", "500", "--seed", "7")
    a, b = call(*argv), call(*argv)
    assert a == b and a[0] == EXIT_OK
    payload = json.loads(a[1])
    assert float(payload["ratio_float"]) >= 1 / 3


def test_ratio_exhaustive_grid():
    code, text = call("ratio", "--mechanism", "dr", "--M", "2", "--exhaustive", "--grid", "-1,0,1", "--submodular")
    assert code == EXIT_OK
    assert json.loads(text)["evaluated"] > 0


def test_audit_pass_fail_and_cap(capsys):
    code, text = call("audit", "--mechanism", "ur", "--M", "2", "--grid", "-1,0,1")
    assert code == EXIT_OK and json.loads(text)["dsic_on_grid"] is True
    code, text = call("audit", "--mechanism", "welfare-argmax", "--M", "2", "--grid", "0,0.5,1,2")
    assert code == EXIT_FAIL
    w = json.loads(text)["witness"]
    assert w["side"] == "buyer" and w["report"] == ["0", "1"]
    code, text = call("audit", "--mechanism", "ur", "--M", "3", "--grid", "-1,0,1", "--max-checks", "10")
    assert code == EXIT_CAP and text == ""
    assert "refused" in capsys.readouterr().err


def test_verify_bound_formats():
    code, text = call("verify-bound", "--family", "general", "--M", "3")
    assert code == EXIT_OK
    payload = json.loads(text)
    assert payload["pass"] is True and "assignment" not in payload
    assert abs(payload["alpha_star_float"] - 1 / 3) < 0.0021
    code, text = call("verify-bound", "--family", "submodular", "--M", "2", "--format", "csv")
    lines = text.splitlines()
    assert lines[0] == "M,family,eps,L,alpha_star,bound,slack,pass" and lines[1].endswith(",pass")
    code, text = call("verify-bound", "--family", "general", "--M", "2", "--assignment")
    assert len(json.loads(text)["assignment"]) > 0


def test_verify_bound_float_failure_exit_code():
    assert call("verify-bound", "--family", "general", "--M", "6", "--mode", "float")[0] == EXIT_FAIL


def test_chain_export():
    code, text = call("chain", "--family", "general", "--M", "2", "--eps", "1/10", "--L", "100")
    chain = json.loads(text)
    nodes = [p["buyer"] for p in chain["profiles"] if p["role"] == "chain-node"]
    assert nodes == [["1", "1"], ["1", "0"], ["0", "-100"]]


def test_reduce_scenarios():
    code, text = call("reduce", "--scenario", str(DATA / "multiunit_M2.json"))
    payload = json.loads(text)
    assert code == EXIT_OK and payload["buyer"] == ["4", "6"] and payload["opt"] == "11"
    code, text = call("reduce", "--scenario", str(DATA / "unitdemand_M2.json"))
    payload = json.loads(text)
    assert payload["seller"] == ["1", "-1"] and payload["oracle_gft"] == "2"


def test_sweep_table_rows_respect_bounds():
    code, text = call("sweep", "--max-M", "3", "--lp-max-M", "2", "--trials", "300", "--format", "json")
    assert code == EXIT_OK
    for row in json.loads(text):
        assert row["ur_worst"] >= row["one_over_M"] - 1e-15
        assert row["dr_worst_submodular"] >= row["one_over_H_M"] - 1e-15
    code, table = call("sweep", "--max-M", "2", "--lp-max-M", "0", "--trials", "50")
    assert table.splitlines()[0].split()[:3] == ["M", "one_over_M", "one_over_H_M"]


def test_module_entry_point_is_byte_identical():
    argv = [sys.executable, "-m", "coopbounds", "ratio", "--mechanism", "dr", "--M", "2", "--trials", "200", "--format", "csv"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and a.startswith(b"mechanism,")
