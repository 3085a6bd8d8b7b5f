import time

import pytest

_ACCEPTANCE: dict[int, tuple[str, str, float]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_call(item):
    start = time.perf_counter()
    yield
    item._elapsed = time.perf_counter() - start


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or rep.when != "call":
        return
    number, title = mark.args
    _ACCEPTANCE[number] = ("PASS" if rep.passed else "FAIL", title, getattr(item, "_elapsed", 0.0))
    print(f"\n[acceptance {number:2d}] {_ACCEPTANCE[number][0]}  {title}")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        status, title, dt = _ACCEPTANCE[n]
        terminalreporter.write_line(f"{n:2d}  {status}  {dt:7.3f} s  {title}")
