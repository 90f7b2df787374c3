from __future__ import annotations

import pytest

from resumkit.fixtures import BUBBLE, G_EYE, TADPOLE, TRIANGLE

_acceptance: dict[int, dict] = {}


@pytest.fixture
def g_eye():
    return G_EYE


@pytest.fixture
def bubble():
    return BUBBLE


@pytest.fixture
def triangle():
    return TRIANGLE


@pytest.fixture
def tadpole():
    return TADPOLE


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    entry = _acceptance.setdefault(number, {"title": title, "ok": True, "seen": False})
    if report.when == "call" or report.failed:
        entry["seen"] = True
        if report.failed:
            entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        entry = _acceptance[number]
        if not entry["seen"]:
            continue
        status = "PASS" if entry["ok"] else "FAIL"
        terminalreporter.write_line(f"AC{number:<3} {status}  {entry['title']}")
