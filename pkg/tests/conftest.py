import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): one acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or rep.when not in ("setup", "call"):
        return
    number, title = mark.args
    detail = "; ".join(f"{k}={v}" for k, v in item.user_properties)
    if rep.when == "setup" and rep.passed:
        return
    _RESULTS[number] = (title, rep.passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, ok, detail = _RESULTS[number]
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title}"
        if detail:
            line += f" [{detail}]"
        terminalreporter.write_line(line)
