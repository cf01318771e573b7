import re

_ACCEPTANCE_RESULTS = {}


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    match = re.search(r"test_acceptance.*::test_(c\d+)", report.nodeid)
    if match:
        _ACCEPTANCE_RESULTS[match.group(1)] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for key in sorted(_ACCEPTANCE_RESULTS):
        outcome = _ACCEPTANCE_RESULTS[key]
        label = "PASS" if outcome == "passed" else outcome.upper()
        terminalreporter.write_line(f"criterion {key[1:]}: {label}")
