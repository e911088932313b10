import pytest


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    # One visible pass/fail line per acceptance check.
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and "test_acceptance" in item.nodeid:
        reporter = item.config.pluginmanager.get_plugin("terminalreporter")
        if reporter is not None:
            status = "PASS" if report.passed else "FAIL"
            reporter.write_line(f"[acceptance] {item.name}: {status}")
