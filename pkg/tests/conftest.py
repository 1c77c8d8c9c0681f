import pytest

ACCEPTANCE = {}


def pytest_addoption(parser):
    parser.addoption("--stretch", action="store_true", default=False, help="also run stretch criteria")


def pytest_configure(config):
    config.addinivalue_line("markers", "stretch: long-running criterion, needs --stretch")
    config.addinivalue_line("markers", "acceptance(n, title): test decides acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    n, title = marker.args
    if report.skipped:
        verdict = "SKIP"
    elif report.when != "call" and report.passed:
        return
    else:
        verdict = "PASS" if report.passed else "FAIL"
    previous = ACCEPTANCE.get(n, ("PASS", title))[0]
    # a failure anywhere in the criterion sticks
    if previous == "FAIL" or (previous == "SKIP" and verdict == "PASS"):
        verdict = previous
    ACCEPTANCE[n] = (verdict, title)


def pytest_collection_modifyitems(config, items):
    if config.getoption("--stretch"):
        return
    skip = pytest.mark.skip(reason="stretch criterion; run with --stretch")
    for item in items:
        if "stretch" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        verdict, title = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:>2}: {verdict}  {title}")
