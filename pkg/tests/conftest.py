import pytest

CRITERIA: dict[str, str] = {}


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion."""

    def record(key: str, ok: bool, detail: str, advisory: bool = False) -> bool:
        status = "PASS" if ok else ("WARN" if advisory else "FAIL")
        CRITERIA[key] = f"{status}  criterion {key}: {detail}"
        print(CRITERIA[key])
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for key in sorted(CRITERIA, key=lambda k: (int(k.split(".")[0].rstrip("abc")), k)):
            terminalreporter.write_line(CRITERIA[key])
