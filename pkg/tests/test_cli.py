import json
import math

import numpy as np
import pytest

from hierarg.cli import main
from hierarg._expr import compile_expression
from hierarg.errors import DomainError

W_HAT_1_AT_1 = 0.9975347662205668  # frozen oracle (tests/oracles/branch_values.py)


class TestExpressions:
    def test_basic_profiles(self):
        x = np.linspace(0.0, math.pi, 11)
        f = compile_expression("0.1*sin(x)")
        assert np.abs(f(x) - 0.1 * np.sin(x)).max() < 1e-15
        g = compile_expression("0.1*(1 - cos(x))")
        assert np.abs(g(x) - 0.1 * (1.0 - np.cos(x))).max() < 1e-15

    def test_polynomial_and_power(self):
        x = np.linspace(0.0, 2.0, 9)
        f = compile_expression("x**3 - 2*x + 0.5")
        assert np.abs(f(x) - (x ** 3 - 2 * x + 0.5)).max() < 1e-14

    def test_pi_and_nesting(self):
        x = np.array([0.25, 0.5])
        f = compile_expression("sin(pi*x) + cos(2*x)/4")
        assert np.abs(f(x) - (np.sin(np.pi * x) + np.cos(2 * x) / 4)).max() < 1e-15

    def test_unary_minus(self):
        f = compile_expression("-sin(x)")
        assert f(np.array([1.0]))[0] == -math.sin(1.0)

    def test_rejects_unknown_names(self):
        with pytest.raises(DomainError):
            compile_expression("exp(x)")
        with pytest.raises(DomainError):
            compile_expression("__import__('os')")
        with pytest.raises(DomainError):
            compile_expression("sin(x")


def run(tmp_path, *argv):
    import os
    old = os.getcwd()
    os.chdir(tmp_path)
    try:
        return main(list(argv))
    finally:
        os.chdir(old)


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as info:
        main(["flow", "--alpha", "-1", "--init", "sin(x)", "--t-end", "1"])
    assert info.value.code == 2


def test_numerical_failure_exit_code(tmp_path):
    # no branch at alpha >= 2/j^2
    code = run(tmp_path, "equilibrium", "--alpha", "2.5", "--j", "1")
    assert code == 1


def test_bifurcation_sweep(tmp_path):
    code = run(tmp_path, "bifurcation", "--j", "1", "--alpha-min", "0.8",
               "--alpha-max", "1.6", "--steps", "5")
    assert code == 0
    rows = [line for line in (tmp_path / "bifurcation.csv").read_text().splitlines()
            if line and not line.startswith("#")]
    assert rows[0] == "alpha,j,w_hat,period,energy"
    data = np.array([[float(v) for v in r.split(",")] for r in rows[1:]])
    assert len(data) == 5
    row_at_1 = data[np.argmin(np.abs(data[:, 0] - 1.0))]
    assert abs(row_at_1[2] - W_HAT_1_AT_1) < 1e-10
    assert np.all(np.diff(data[:, 2]) < 0.0)  # w_hat decreasing in alpha
    fig2 = [line for line in (tmp_path / "figure2.csv").read_text().splitlines()
            if line and not line.startswith("#")]
    assert fig2[0] == "alpha,w_hat_1,inverse_alpha,difference"
    diffs = np.array([float(r.split(",")[3]) for r in fig2[1:]])
    assert (diffs > 0.0).all()


def test_spectrum_trivial(tmp_path):
    code = run(tmp_path, "spectrum", "--alpha", "3", "--branch", "trivial")
    assert code == 0
    doc = json.loads((tmp_path / "spectrum.json").read_text())
    expected = [3 * k * k - 2 for k in range(1, 6)]
    assert np.abs(np.array(doc["eigenvalues"]) - expected).max() < 1e-3
    assert doc["negative_count"] == 0
    assert doc["version"]
    assert doc["config"]["alpha"] == 3.0


def test_equilibrium_outputs(tmp_path):
    code = run(tmp_path, "equilibrium", "--alpha", "1.0", "--j", "1")
    assert code == 0
    doc = json.loads((tmp_path / "orbit_report.json").read_text())
    assert doc["h2_residual"] < 1e-8
    assert abs(doc["w_hat"] - W_HAT_1_AT_1) < 1e-10
    lines = (tmp_path / "orbit.csv").read_text().splitlines()
    assert any(line.startswith("# hierarg") for line in lines)


def test_criterium_verdicts(tmp_path):
    assert run(tmp_path, "criterium", "--alpha", "3", "--branch", "trivial") == 0
    doc = json.loads((tmp_path / "criterium.json").read_text())
    assert doc["verdict"] == "stable"
    assert run(tmp_path, "criterium", "--alpha", "0.4", "--branch", "2+") == 0
    doc = json.loads((tmp_path / "criterium.json").read_text())
    assert doc["verdict"] == "unstable"
    assert 0.0 < doc["first_zero"] < math.pi


def test_flow_end_to_end(tmp_path):
    code = run(tmp_path, "flow", "--alpha", "1", "--init", "0.1*sin(x)",
               "--t-end", "20", "--stride", "2000")
    assert code == 0
    doc = json.loads((tmp_path / "flow_summary.json").read_text())
    assert doc["converged"] is True
    assert doc["attractor"] == "psi_1_plus"
    assert doc["monitors_ok"] is True
    assert doc["h1_distance_to_psi_1_plus"] < 1e-5


def test_liapunov_monotone(tmp_path):
    code = run(tmp_path, "liapunov", "--alpha", "1", "--init", "0.1*sin(x)",
               "--t-end", "5", "--stride", "500")
    assert code == 0
    doc = json.loads((tmp_path / "liapunov.json").read_text())
    assert doc["monotone_nonincreasing"] is True
    assert doc["V_final"] < doc["V_initial"]


def test_discrete_table(tmp_path):
    code = run(tmp_path, "discrete", "--beta", str(12 * math.pi),
               "--n-list", "8,16,32")
    assert code == 0
    doc = json.loads((tmp_path / "discrete.json").read_text())
    assert all(0.4 < r < 0.6 for r in doc["ratios"])


def test_phase_portrait_classification(tmp_path):
    code = run(tmp_path, "phase-portrait", "--alpha", "1",
               "--w0-list", "0,0.5,1,1.5", "--samples", "32")
    assert code == 0
    doc = json.loads((tmp_path / "phase_portrait.json").read_text())
    cls = doc["classification"]
    assert cls["0"] == "point"
    assert cls["0.5"] == "closed"
    assert cls["1"] == "separatrix"
    assert cls["1.5"] == "unbounded"


def test_determinism(tmp_path):
    d1 = tmp_path / "a"
    d2 = tmp_path / "b"
    d1.mkdir()
    d2.mkdir()
    for d in (d1, d2):
        assert run(d, "bifurcation", "--j", "2", "--alpha-min", "0.2",
                   "--alpha-max", "0.45", "--steps", "4") == 0
    assert (d1 / "bifurcation.csv").read_bytes() == (d2 / "bifurcation.csv").read_bytes()
    assert (d1 / "figure2.csv").read_bytes() == (d2 / "figure2.csv").read_bytes()


def test_plot_data_flag(tmp_path):
    code = run(tmp_path, "bifurcation", "--j", "1", "--alpha-min", "1.0",
               "--alpha-max", "1.5", "--steps", "3", "--plot-data", "bif.dat")
    assert code == 0
    lines = (tmp_path / "bif.dat").read_text().strip().splitlines()
    assert len(lines) == 3
    assert all(len(line.split()) == 2 for line in lines)


def test_threads_env_sweep(tmp_path, monkeypatch):
    monkeypatch.setenv("HIERARG_THREADS", "4")
    code = run(tmp_path, "bifurcation", "--j", "1", "--alpha-min", "0.9",
               "--alpha-max", "1.8", "--steps", "6")
    assert code == 0
    rows = [line for line in (tmp_path / "bifurcation.csv").read_text().splitlines()
            if line and not line.startswith("#")]
    assert len(rows) == 7  # header + 6 cells, order preserved
