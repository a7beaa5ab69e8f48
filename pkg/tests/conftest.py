import pytest

_RESULTS = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not (rep.when == "setup" and rep.failed):
        return
    _RESULTS.append((mark.args[0], mark.args[1], rep.passed))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    # several tests may share one criterion; it passes only if all do
    summary = {}
    for n, text, ok in _RESULTS:
        prev = summary.get(n, (text, True))
        summary[n] = (prev[0], prev[1] and ok)
    terminalreporter.section("acceptance criteria")
    for n in sorted(summary):
        text, ok = summary[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {n:>2}: {text}")
