"""Shared test plumbing: the acceptance-criteria result registry.

test_acceptance.py records one (number, description, passed) entry per
criterion; the terminal-summary hook prints them as one line each at the
end of the run, visible regardless of output capturing.
"""

ACCEPTANCE: list[tuple[int, str, bool]] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, desc, ok in sorted(ACCEPTANCE):
        word = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{word}] criterion {num}: {desc}")
