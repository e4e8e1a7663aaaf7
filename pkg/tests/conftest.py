import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

CRITERIA: dict[int, str] = {}


def record_criterion(number: int, title: str, ok: bool, detail: str) -> str:
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    CRITERIA[number] = line
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[n])
