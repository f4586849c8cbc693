import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    from shared import RESULTS, TITLES

    if not RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for c in sorted(RESULTS):
        parts = RESULTS[c]
        ok = all(p[1] for p in parts)
        tr.write_line(f"criterion {c} ({TITLES.get(c, '')}): {'PASS' if ok else 'FAIL'}")
        for part, pok, detail in parts:
            tr.write_line(f"    {part}: {'ok' if pok else 'not met'}" + (f" ({detail})" if detail else ""))
