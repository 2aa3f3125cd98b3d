from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

# one line per acceptance criterion, filled in by test_acceptance.py
CRITERIA = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, secs, note = CRITERIA[n]
        terminalreporter.write_line("criterion %2d: %s  (%.1fs)%s" % (n, "PASS" if ok else "FAIL", secs,
                                                                    "  " + note if note else ""))
