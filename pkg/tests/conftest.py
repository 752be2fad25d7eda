import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if not name.startswith("test_c"):
        return
    num = name[6:8]
    _ACCEPTANCE[num] = (report.outcome == "passed", name[9:].replace("_", " "))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    tw = terminalreporter
    tw.section("acceptance criteria")
    for num in sorted(_ACCEPTANCE):
        ok, desc = _ACCEPTANCE[num]
        tw.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  ({desc})")
