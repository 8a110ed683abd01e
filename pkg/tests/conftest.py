import pytest

from stockga.data import parse_dataset
from stockga.samples import sample_text

CHAIN_MEMBERS = ("F1", "DC1", "DC2", "DC3", "A1", "A2", "A3", "A4", "A5", "A6")

_acceptance_lines: list[str] = []


@pytest.fixture
def sample():
    return parse_dataset(sample_text())


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion for the summary."""

    def record(criterion: int, name: str, passed: bool, detail: str = "") -> bool:
        status = "PASS" if passed else "FAIL"
        _acceptance_lines.append(f"[{status}] criterion {criterion}: {name}" + (f" ({detail})" if detail else ""))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
