from pathlib import Path

import pytest

from dlfriction.econ import FrictionModel, LotterySpec

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


@pytest.fixture
def ref():
    return LotterySpec.reference_instance()


@pytest.fixture
def dl():
    return FrictionModel.distributed_ledger()


@pytest.fixture
def bnm():
    return FrictionModel.bricks_and_mortar()


@pytest.fixture
def reference_scenario():
    return SCENARIOS / "reference.toml"


@pytest.fixture
def fixed_odds_scenario():
    return SCENARIOS / "fixed_odds.toml"


def pytest_terminal_summary(terminalreporter):
    from tests.criteria import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(LINES, key=lambda s: int(s[6:8])):
            terminalreporter.write_line(line)
