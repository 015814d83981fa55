import sys
from pathlib import Path

# make the sibling oracles module importable regardless of invocation dir
sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE_FILE = "test_acceptance.py"


def pytest_terminal_summary(terminalreporter):
    """One pass/fail line per acceptance criterion, visible without -s."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            if _ACCEPTANCE_FILE not in str(getattr(report, "nodeid", "")):
                continue
            if getattr(report, "when", "call") != "call" and outcome == "passed":
                continue
            name = report.nodeid.split("::")[-1]
            status = "PASS" if outcome == "passed" else "FAIL"
            lines.append(f"[{status}] {name}")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
