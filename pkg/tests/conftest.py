import pytest

# One entry per acceptance criterion: (name, passed, detail). Populated by the
# `criterion` fixture so the terminal summary can print one line per criterion.
ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion():
    """Record and assert one acceptance criterion outcome."""

    def _check(name: str, ok: bool, detail: str = ""):
        ACCEPTANCE_RESULTS.append((name, bool(ok), detail))
        print(f"[acceptance] {name}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, f"{name}: {detail}"

    return _check


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
