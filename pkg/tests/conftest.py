from pathlib import Path

import pytest

from cigkit import ChartSet, parse_statechart

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
VENDING = FIXTURES / "vending_machine.sc"
DISPENSER = FIXTURES / "dispenser.sc"


@pytest.fixture(scope="session")
def vending_chart():
    return parse_statechart(VENDING.read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def dispenser_chart():
    return parse_statechart(DISPENSER.read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def fixture_charts(vending_chart, dispenser_chart):
    return ChartSet((vending_chart, dispenser_chart))
