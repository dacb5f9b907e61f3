from __future__ import annotations

import sys
from pathlib import Path

import pytest

from transit_dtue.costs import CostModel, SYNTHETIC_WEIGHTS
from transit_dtue.network import Network
from transit_dtue.scenario import FIXTURE_DIR


@pytest.fixture(scope="session")
def two_od() -> Network:
    return Network.load(Path(FIXTURE_DIR) / "two_od_example.json")


@pytest.fixture(scope="session")
def two_od_model(two_od) -> CostModel:
    return CostModel(two_od, SYNTHETIC_WEIGHTS)


@pytest.fixture(scope="session")
def synthetic() -> Network:
    return Network.load(Path(FIXTURE_DIR) / "synthetic4.json")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    RESULTS = mod.RESULTS
    terminalreporter.section("acceptance criteria")
    for name in sorted(RESULTS, key=lambda n: int(n.split()[0]) if n.split()[0].isdigit() else 99):
        ok, detail = RESULTS[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {name}: {detail}")
