import pytest

from mixsched.traffic import FlowSpec

ACCEPTANCE_LINES = []


@pytest.fixture
def two_flows():
    return [FlowSpec(0, 0.0, 2.0), FlowSpec(1, 1.0, 1.0)]


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
