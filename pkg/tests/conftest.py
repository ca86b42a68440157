from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from helpers import oneway_pairs  # noqa: E402
from railnet.randomgen import GenConfig, _pairs_connected, network_from_pairs, random_network  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixture_path():
    return lambda name: FIXTURES / name


@st.composite
def networks(draw, min_switches: int = 2, max_switches: int = 12):
    """Uniform random rail networks of a drawn even size."""
    n = 2 * draw(st.integers(min_switches // 2, max_switches // 2))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_network(GenConfig(n, seed=seed), 0)


@st.composite
def oneway_networks(draw, min_switches: int = 2, max_switches: int = 12):
    n = 2 * draw(st.integers(min_switches // 2, max_switches // 2))
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    while True:
        pairs = oneway_pairs(n, rng)
        if _pairs_connected(n, pairs):
            return network_from_pairs(n, pairs)


def any_networks(max_switches: int = 12):
    return st.one_of(networks(max_switches=max_switches), oneway_networks(max_switches=max_switches))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
