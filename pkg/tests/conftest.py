from __future__ import annotations

import os
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

FIXTURES = Path(__file__).parent / "fixtures"

_criteria: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not rep.failed:
        return
    n, title = mark.args
    entry = _criteria.setdefault(n, [title, True, 0.0, 0.0])
    entry[1] = entry[1] and rep.passed
    for key, (elapsed, limit) in rep.user_properties:
        if key == "timed":
            entry[2] += elapsed
            entry[3] = limit


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        title, ok, secs, limit = _criteria[n]
        terminalreporter.write_line(
            f"criterion {n}: {'PASS' if ok else 'FAIL'} | {title} | {secs:.2f}s of {limit:g}s budget"
        )


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES
