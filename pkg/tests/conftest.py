import pytest

from dyncc import NetworkSnapshot, SystemParams


@pytest.fixture
def example1_params():
    return SystemParams(alpha=4, P=3, t_bar=1)


@pytest.fixture
def example1_snapshot():
    return NetworkSnapshot.from_groups([[1, 2], [3, 4, 5], [6, 7, 8]])


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
