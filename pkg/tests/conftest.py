import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_RESULTS: dict[str, str] = {}
_DETAILS: dict[str, str] = {}


@pytest.fixture
def record_detail(request):
    """Attach a one-line summary to the acceptance line of the current test."""
    def record(text: str) -> None:
        _DETAILS[request.node.nodeid] = text
    return record


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _RESULTS[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for nodeid, outcome in _RESULTS.items():
        name = nodeid.split("::")[-1]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        detail = _DETAILS.get(nodeid)
        terminalreporter.write_line(f"{verdict}  {name}" + (f"  ({detail})" if detail else ""))
