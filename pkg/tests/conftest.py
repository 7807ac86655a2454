"""Shared pytest fixtures for underlay simulator tests."""

from collections.abc import Iterator

import numpy as np
import pytest

from underlay_sim.channels.fading import scenario_system
from underlay_sim.core.config import Settings
from underlay_sim.core.executor import MonteCarloExecutor
from underlay_sim.core.models import ChannelSpec, Scenario, SystemSpec

SEED = 20240101


@pytest.fixture
def rng() -> np.random.Generator:
    """Create a seeded random stream."""
    return np.random.default_rng(SEED)


@pytest.fixture
def other_rng() -> np.random.Generator:
    """Create a second, independent seeded random stream."""
    return np.random.default_rng(SEED + 1)


@pytest.fixture
def test_settings() -> Settings:
    """Create settings for testing."""
    return Settings(
        workers=2,
        chunk_size=4096,
        log_level="INFO",
        debug=False,
    )


@pytest.fixture
def executor() -> Iterator[MonteCarloExecutor]:
    """Create a two-worker Monte Carlo executor."""
    with MonteCarloExecutor(SEED, workers=2, chunk_size=4096) as mc:
        yield mc


@pytest.fixture
def rayleigh_rayleigh() -> SystemSpec:
    """Rayleigh on every link, all averages 0 dB, PU SNR 10 dB."""
    return scenario_system(Scenario.RAYLEIGH_RAYLEIGH, k_factor=10.0)


@pytest.fixture
def rician_rayleigh() -> SystemSpec:
    """Rician (K = 10 dB) interference links and a Rayleigh SU-SU link."""
    return scenario_system(Scenario.RICIAN_RAYLEIGH, k_factor=10.0)


@pytest.fixture
def awgn_system() -> SystemSpec:
    """Deterministic links (K = 1e12) with unit averages and PU SNR 10."""
    return scenario_system(Scenario.AWGN, k_factor=10.0)


@pytest.fixture
def rician_link() -> ChannelSpec:
    """Rician link with K = 10 and unit average power."""
    return ChannelSpec(k_factor=10.0, avg_power=1.0)
