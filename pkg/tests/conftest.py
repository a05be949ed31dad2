from pathlib import Path

import numpy as np
import pytest

from radar_oco import (FrequencySet, JammerActionSet, LinkBudgetParams, RadarActionSet,
                       build_cost_matrix, compute_received_powers, default_sinr_threshold)

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "configs"


def make_game(L=4, M=2, flat_echo=False, special=None):
    fs = FrequencySet(10e9, 100e6, L)
    rs = RadarActionSet(fs, M)
    js = JammerActionSet(rs, tuple(special or {}))
    powers = compute_received_powers(LinkBudgetParams(), fs.frequencies, flat_echo)
    c = default_sinr_threshold(powers)
    U = build_cost_matrix(rs, js, powers, c, special)
    return rs, js, powers, c, U


@pytest.fixture(scope="session")
def desk_game():
    return make_game(4, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
