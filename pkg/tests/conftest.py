import os
import sys

from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], max_examples=60)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# acceptance results, filled in by test_acceptance.py and printed at the end of the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        name, ok, secs, limit, detail = ACCEPTANCE[n]
        verdict = "PASS" if ok else "FAIL"
        line = f"criterion {n:2d} {verdict}  {name}  ({secs:.1f}s, limit {limit}s)"
        if detail:
            line += f"  {detail}"
        terminalreporter.write_line(line)
