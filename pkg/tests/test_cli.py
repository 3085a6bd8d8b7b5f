import csv
import io
import json
import math
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from distcalc.cli import run_command

SCHEMA = json.loads((Path(__file__).parents[1] / "docs" / "report.schema.json").read_text())


def run(*argv):
    out = io.StringIO()
    code = run_command(list(argv), out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv, "--format", "json")
    doc = json.loads(text)
    jsonschema.validate(doc, SCHEMA)
    return code, doc


def test_eval_delta():
    code, doc = run_json("eval", "delta(0)", "gauss(0)")
    assert code == 0
    assert doc["summary"]["value_re"] == 1.0 and doc["summary"]["value_im"] == 0.0
    code, text = run("eval", "delta(0)", "gauss(0)")
    assert "value: 1\n" in text


def test_ft_delta_prints_constant():
    code, doc = run_json("ft", "delta(0)")
    assert doc["summary"]["result"] == "0.15915494309189535 * regular(one)"
    assert float(doc["summary"]["result"].split()[0]) == 1 / (2 * math.pi)


def test_diff():
    code, doc = run_json("diff", "regular(abs)", "--order", "1")
    assert doc["summary"]["result"] == "D(regular(abs))"


def test_recover_table_converges():
    code, doc = run_json("recover", "regular(H)", "--at", "0", "--mollifier", "gauss(0)/sqrt(pi)",
                         "--ks", "4,16,64,256")
    assert code == 0
    assert [r["k"] for r in doc["per_item"]] == [4, 16, 64, 256]
    assert abs(doc["per_item"][-1]["estimate_re"] - 0.5) <= 5e-3


def test_witness_and_probe():
    code, doc = run_json("witness", "delta(0)", "--at", "0")
    assert 0.95 <= doc["summary"]["growth_exponent"] <= 1.05
    code, doc = run_json("probe", "regular(H)", "delta(0)", "--family", "gauss", "--omegas", "-2,-1,0,1,2")
    assert doc["summary"]["status"] == "separated"
    code, doc = run_json("probe", "D(regular(H))", "delta(0)")
    assert doc["summary"]["status"] == "indistinguishable"
    code, doc = run_json("probe", "regular(H)", "regular(chi(0,1))", "--family", "box_window",
                         "--windows", "0:0.5,1:2")
    assert doc["summary"]["param"] == [1.0, 2.0]


def test_seminorm():
    code, doc = run_json("seminorm", "gauss(0)", "--m", "2", "--n", "0")
    assert doc["summary"]["value"] == pytest.approx(1 / math.e, rel=1e-9)


@pytest.mark.parametrize("argv", [("check", "gpf", "expabs", "gauss(0)"),
                                  ("check", "ibp", "abs", "bump(-1,2)"),
                                  ("check", "growth", "mono(2)", "--C", "1", "--N", "3"),
                                  ("check", "ftic")])
def test_checks_pass(argv):
    code, doc = run_json(*argv)
    assert code == 0
    summary = doc["summary"]
    assert summary.get("pass", summary.get("bound_holds"))


def test_ftic_with_smaller_constant_reports_violation():
    code, doc = run_json("check", "ftic", "gauss(1)", "--constant", str(1 / (2 * math.pi ** 2)))
    assert code == 0 and doc["summary"]["bound_holds"] is False


def test_csv_columns_are_fixed():
    code, text = run("recover", "regular(H)", "--at", "0", "--ks", "4,16", "--format", "csv")
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["k", "estimate_re", "estimate_im", "error_estimate"]
    assert len(rows) == 3
    code, text = run("ft", "delta(0)", "--format", "csv")
    assert text.splitlines()[0] == "key,value"


def test_output_is_deterministic():
    for fmt in ("text", "json", "csv"):
        a = run("probe", "regular(H)", "regular(sign)", "--format", fmt)
        b = run("probe", "regular(H)", "regular(sign)", "--format", fmt)
        assert a == b


def test_floats_use_17_digits():
    code, doc = run_json("eval", "regular(H)", "gauss(0)")
    code, text = run("eval", "regular(H)", "gauss(0)", "--format", "json")
    assert f'"value_re": {format(doc["summary"]["value_re"], ".17g")}' in text


def test_errors_are_structured():
    code, doc = run_json("eval", "delta(", "gauss(0)")
    assert code == 1
    assert doc["error"] == {"error": "SyntaxError", "message": "at offset 6: expected expression",
                            "offset": 6, "expected": "expression"}
    code, doc = run_json("ft", "nosuch(1)")
    assert code == 1 and doc["error"]["identifier"] == "nosuch"
    code, doc = run_json("diff", "delta(0)", "--order", "13")
    assert code == 1 and doc["error"]["error"] == "OrderCap"
    code, text = run("eval", "gauss(0)", "delta(0)")
    assert code == 1 and text.startswith("error: TypeMismatch")


def test_usage_errors_exit_2(capsys):
    assert run("frobnicate")[0] == 2
    assert run("check", "gpf")[0] == 2


def test_tolerance_sources(monkeypatch):
    monkeypatch.delenv("DISTCALC_TOL", raising=False)
    assert run_json("eval", "regular(H)", "gauss(0)")[1]["tolerances"]["tol"] == 1e-8
    assert run_json("check", "gpf", "expabs", "gauss(0)")[1]["tolerances"]["tol"] == 1e-6
    monkeypatch.setenv("DISTCALC_TOL", "1e-7")
    assert run_json("eval", "regular(H)", "gauss(0)")[1]["tolerances"]["tol"] == 1e-7
    assert run_json("eval", "regular(H)", "gauss(0)", "--tol", "1e-9")[1]["tolerances"]["tol"] == 1e-9


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "distcalc", "eval", "delta(0)", "gauss(0)",
                           "--format", "json"], capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["summary"]["value_re"] == 1.0
