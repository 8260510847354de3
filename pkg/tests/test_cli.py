import csv
import io
import json
import math
import subprocess
import sys

import pytest

from prolate import cli
from prolate.errors import ConvergenceError


def run(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), out=out)
    return code, out.getvalue()


def rows(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    return list(csv.DictReader(lines))


def test_eigen_legendre_limit():
    code, text = run("eigen", "--m", "0", "--n", "0", "--gamma", "0", "--method", "oracle")
    assert code == 0
    assert float(rows(text)[0]["lambda"]) == 0.0


def test_eigen_both_methods():
    code, text = run("eigen", "--m", "0", "--n", "2", "--gamma", "40", "--method", "both")
    assert code == 0
    r = rows(text)
    assert [x["method"] for x in r] == ["oracle", "asymptotic"]
    assert abs(float(r[0]["lambda"]) - float(r[1]["lambda"])) < 5.0
    for x in r:
        lam = float(x["lambda"])
        assert float(x["diagnostic"]) == pytest.approx(lam + 1600 - 5 * 40, abs=1e-9)


def test_eigen_mode_violation(capsys):
    code, _ = run("eigen", "--m", "3", "--n", "2", "--gamma", "5")
    assert code == 3
    assert "m <= n violated" in capsys.readouterr().err


def test_eigen_asymptotic_outside_band():
    code, _ = run("eigen", "--m", "0", "--n", "30", "--gamma", "10", "--method", "asymptotic")
    assert code == 3


def test_eval_odd_mode_zero():
    code, text = run("eval", "--kind", "angular", "--m", "0", "--n", "1", "--gamma", "30", "--x", "0")
    assert code == 0
    assert float(rows(text)[0]["value"]) == 0.0


def test_eval_radial_domain(capsys):
    code, _ = run("eval", "--kind", "radial", "--m", "0", "--n", "1", "--gamma", "30", "--x", "0.5")
    assert code == 2
    assert "x > 1" in capsys.readouterr().err


@pytest.mark.parametrize("grid", ["0:1", "a:b:3", "0:0.5:0", "0:0.5:x"])
def test_malformed_grid(grid):
    code, _ = run("eval", "--kind", "angular", "--m", "0", "--n", "0", "--gamma", "30", "--grid", grid)
    assert code == 2


def test_usage_errors():
    assert run("eval", "--kind", "angular", "--m", "0", "--n", "0", "--gamma", "30")[0] == 2
    assert run("eval", "--kind", "angular", "--m", "0", "--n", "0", "--gamma", "30", "--x", "0.2",
               "--method", "lg")[0] == 2
    assert run("eigen", "--m", "0", "--n", "0", "--gamma", "-1")[0] == 2
    assert run("eigen", "--m", "0")[0] == 2
    assert run("bogus")[0] == 2
    assert run("eval", "--kind", "angular", "--m", "0", "--n", "0", "--gamma", "30", "--x", "0.2",
               "--delta0", "0.5")[0] == 2


def test_compare_report():
    code, text = run("compare", "--kind", "angular", "--m", "0", "--n", "2", "--gamma", "30",
                     "--grid", "0:0.7:50")
    assert code == 0
    body = rows(text)
    assert len(body) == 50
    footer = text.strip().splitlines()[-1]
    assert footer.startswith("# max_rel_err=")
    fields = dict(kv.split("=") for kv in footer[2:].split())
    assert math.isfinite(float(fields["max_rel_err"]))
    assert float(fields["max_rel_err"]) == pytest.approx(max(float(r["rel_err"]) for r in body))


def test_compare_jsonl():
    code, text = run("compare", "--kind", "radial", "--m", "1", "--n", "2", "--gamma", "30",
                     "--grid", "1.01:3:4", "--format", "jsonl")
    assert code == 0
    recs = [json.loads(l) for l in text.splitlines()]
    assert len(recs) == 5 and "summary" in recs[-1]
    for r in recs[:-1]:
        assert r["value"] == pytest.approx(r["sign"] * math.exp(r["log_magnitude"]), rel=1e-12)


def test_output_deterministic():
    args = ("eval", "--kind", "angular", "--m", "1", "--n", "3", "--gamma", "25", "--grid", "-0.9:0.9:7")
    assert run(*args) == run(*args)


def test_coeffs_legendre_limit():
    code, text = run("coeffs", "--m", "1", "--n", "3", "--gamma", "0")
    assert code == 0
    r = rows(text)
    assert len(r) == 1 and r[0]["k"] == "0" and float(r[0]["a"]) == 1.0
    footer = text.strip().splitlines()[-1]
    assert footer.startswith("# A=") and " K=" in footer


def test_coeffs_truncation_doubling():
    _, t1 = run("coeffs", "--m", "0", "--n", "2", "--gamma", "20", "--trunc", "60")
    _, t2 = run("coeffs", "--m", "0", "--n", "2", "--gamma", "20", "--trunc", "120")
    a1 = {r["k"]: float(r["a"]) for r in rows(t1)}
    a2 = {r["k"]: float(r["a"]) for r in rows(t2)}
    for k, v in a1.items():
        assert abs(v - a2.get(k, 0.0)) < 1e-10


def test_numerical_failure_exit_code(monkeypatch):
    def boom(*args, **kwargs):
        raise ConvergenceError("forced")
    monkeypatch.setattr(cli, "eigenvalue_oracle", boom)
    assert run("eigen", "--m", "0", "--n", "0", "--gamma", "5")[0] == 4


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "prolate", "eigen", "--m", "0", "--n", "0", "--gamma", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "method,lambda,sigma,alpha,diagnostic"
