import time

import numpy as np
import pytest

from cfprop.bench import compute_reference, preset, run_benchmark
from cfprop.model import MorseConfig, morse_ground_state, walker_preston
from cfprop.spectral import SpatialGrid

# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def grid64():
    return SpatialGrid(-0.8, 4.32, 64)


@pytest.fixture(scope="session")
def morse():
    return MorseConfig()


@pytest.fixture(scope="session")
def wp64(morse, grid64):
    return walker_preston(morse, grid64)


@pytest.fixture(scope="session")
def u0(morse, grid64):
    return morse_ground_state(morse, grid64)


@pytest.fixture(scope="session")
def wp64_cfg():
    return preset("walker-preston-64")


@pytest.fixture(scope="session")
def wp64_run(wp64_cfg):
    """Reference and full sweep of the 64-point preset, shared by several modules."""
    start = time.perf_counter()
    ref = compute_reference(wp64_cfg)
    records = run_benchmark(wp64_cfg, ref)
    return ref, records, time.perf_counter() - start


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
