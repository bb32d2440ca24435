import math

import numpy as np
import pytest

from doalf.fingerprint import Scenario, build_database, default_grid, place_aps
from doalf.radio import DoaModel, RadioModel, mw_to_dbm, preset


@pytest.fixture
def mmwave_scenario():
    return Scenario(100.0, 100.0, tuple(place_aps(100, 100, 4)), 5.0, mw_to_dbm(30),
                    preset("mmwave60"), DoaModel.from_degrees(2.0))


@pytest.fixture
def noiseless_scenario():
    radio = RadioModel(68.0, 2.0, 0.0, 1.0, "noiseless")
    return Scenario(40.0, 40.0, tuple(place_aps(40, 40, 4)), 10.0, 0.0, radio, DoaModel(0.0))


@pytest.fixture
def small_db(mmwave_scenario):
    sc = mmwave_scenario.replace(rp_interval_m=20.0)
    return build_database(sc, default_grid(sc), 10, 7)


def random_db(rng, m=50, q=4):
    """Database with arbitrary features, for matching oracles."""
    from doalf.fingerprint import FingerprintDatabase

    sc = Scenario(100.0, 100.0, tuple(place_aps(100, 100, q)), 5.0, 0.0,
                  preset("mmwave60"), DoaModel.from_degrees(2.0))
    rps = rng.uniform(0, 100, (m, 2))
    rssi = rng.uniform(-90, -30, (m, q))
    doa = rng.uniform(0, 2 * math.pi, (m, q))
    return FingerprintDatabase(sc, rps, rssi, doa, 1)


_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def report():
    """Record and print one PASS/FAIL line for an acceptance criterion."""

    def _report(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE[number] = line
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[number])
