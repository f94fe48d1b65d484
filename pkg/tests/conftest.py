import pytest

from artifact.grid import GridSpec

# criterion lines collected by test_acceptance.py, echoed in the terminal summary
CRITERIA = {}


def record_criterion(number, title, passed, detail):
    line = f"criterion {number:2d} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"
    CRITERIA[number] = line
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for k in sorted(CRITERIA):
            terminalreporter.write_line(CRITERIA[k])


@pytest.fixture(scope="session")
def grid_default():
    return GridSpec(40.0, 2049)


@pytest.fixture(scope="session")
def grid_pencil():
    return GridSpec(40.0, 1025)


@pytest.fixture(scope="session")
def grid_small():
    return GridSpec(40.0, 513)
