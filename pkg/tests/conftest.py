"""Session-scoped simulation fixtures shared by the acceptance gate.

Full 30-second runs cost about a minute of wall time each, so every run is
simulated once per session and reused by all criteria that inspect it.
"""
import time

import pytest

from cablelift.controller import ControllerGains
from cablelift.harness import compare, run
from cablelift.integrator import IntegratorConfig
from cablelift.scenarios import (Scenario, default_params, equilibrium_state,
                                 group_a, lyapunov_probe, zero_profile)


def pytest_configure(config):
    config.addinivalue_line("markers",
                            "acceptance: end-to-end acceptance gate (slow)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance verdict lines, which stdout capture would hide."""
    import sys
    for name, mod in sys.modules.items():
        if name.endswith("test_acceptance") and hasattr(mod, "VERDICT_LINES"):
            if mod.VERDICT_LINES:
                terminalreporter.section("acceptance verdicts")
                for line in mod.VERDICT_LINES:
                    terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def probe_run():
    """Matched-model, zero-disturbance regulation run from an offset pose."""
    return run(lyapunov_probe())


@pytest.fixture(scope="session")
def equilibrium_hold_run():
    """10 s baseline hold starting exactly at the static equilibrium."""
    params = default_params(m0=1.0)
    sc = Scenario(label="equilibrium-hold", params=params,
                  gains=ControllerGains(),
                  profile=zero_profile(params.n),
                  integrator=IntegratorConfig(dt=1e-3, t_end=10.0),
                  initial_state=equilibrium_state(params), mode="baseline")
    t0 = time.perf_counter()
    tr, metrics = run(sc)
    return tr, metrics, time.perf_counter() - t0


@pytest.fixture(scope="session")
def group_a_pair():
    """Group A (matched model, full disturbances) in both controller modes."""
    return {mode: run(group_a(mode)) for mode in ("baseline", "adaptive")}


@pytest.fixture(scope="session")
def group_b_compare_twice(tmp_path_factory):
    """Two independent full comparison invocations on group B, with outputs."""
    d1 = tmp_path_factory.mktemp("cmpB1")
    d2 = tmp_path_factory.mktemp("cmpB2")
    t0 = time.perf_counter()
    r1 = compare("groupB", out_dir=str(d1))
    elapsed = time.perf_counter() - t0
    r2 = compare("groupB", out_dir=str(d2))
    return {"first": r1, "second": r2, "dirs": (d1, d2), "elapsed": elapsed}


@pytest.fixture(scope="session")
def group_c_compare():
    t0 = time.perf_counter()
    report = compare("groupC")
    report["elapsed"] = time.perf_counter() - t0
    return report
