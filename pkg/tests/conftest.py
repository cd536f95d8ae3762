import pytest

from chanmatch import example1_setup, example2_setup

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def ex1():
    return example1_setup()


@pytest.fixture(scope="session")
def ex1_uniform():
    return example1_setup(priors=(0.5, 0.5))


@pytest.fixture(scope="session")
def ex2():
    return example2_setup()


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
