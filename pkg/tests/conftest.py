import numpy as np
import pytest

from hierarg import equilibria as eq
from hierarg import flow as fl
from hierarg import grid as fg


def pytest_runtest_logreport(report):
    # one visible pass/fail line per acceptance criterion
    if "test_acceptance" in report.nodeid and report.when == "call":
        name = report.nodeid.split("::")[-1]
        if hasattr(report, "wasxfail"):
            status = "XFAIL (known defect, see notes)" if report.skipped else "XPASS"
        else:
            status = "PASS" if report.passed else "FAIL"
        print(f"\n[acceptance] {name}: {status}", flush=True)


@pytest.fixture(scope="session")
def psi1_alpha1():
    return eq.reconstruct_orbit(1.0, 1, "+")


@pytest.fixture(scope="session")
def psi2_alpha04():
    return eq.reconstruct_orbit(0.4, 2, "+")


@pytest.fixture(scope="session")
def orbit_cache():
    cache = {}

    def get(alpha, j, sign="+"):
        key = (alpha, j, sign)
        if key not in cache:
            cache[key] = eq.reconstruct_orbit(alpha, j, sign)
        return cache[key]

    return get


@pytest.fixture(scope="session")
def run_alpha3():
    x = fg.grid_points(256)
    v0 = fg.transform(0.1 * np.sin(x), fg.Parity.ODD)
    return fl.evolve(v0, 3.0, 20.0, dt=1e-3, stride=200)


@pytest.fixture(scope="session")
def run_alpha1():
    x = fg.grid_points(256)
    v0 = fg.transform(0.1 * np.sin(x), fg.Parity.ODD)
    return fl.evolve(v0, 1.0, 20.0, dt=1e-3, stride=200)
