import time

import pytest
from hypothesis import HealthCheck, settings

from cgsik import bundle as bundle_io
from cgsik import pipeline

settings.register_profile("cgsik", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("cgsik")

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def ev3_pre():
    """Full EV3 preprocessing, run once per session; returns (result, seconds)."""
    t0 = time.perf_counter()
    res = pipeline.preprocess_full()
    return res, time.perf_counter() - t0


@pytest.fixture(scope="session")
def ev3_bundle(ev3_pre):
    return ev3_pre[0].bundle


@pytest.fixture(scope="session")
def ev3_cgs(ev3_pre):
    return ev3_pre[0].main_cgs


@pytest.fixture(scope="session")
def bundle_path(ev3_bundle, tmp_path_factory):
    path = tmp_path_factory.mktemp("bundle") / "ev3.bundle"
    bundle_io.save_bundle(ev3_bundle, path)
    return path


@pytest.fixture
def acceptance():
    def record(n, ok, detail):
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
