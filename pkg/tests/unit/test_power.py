"""Unit tests for interference-constrained power allocation."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from underlay_sim.allocation.capacity import ergodic_capacity_mc
from underlay_sim.allocation.power import (
    allocate_power,
    allocate_power_array,
    draw_channel_samples,
    mean_interference,
    region_boundaries,
    solve_lambda,
)
from underlay_sim.core.models import (
    ChannelTriple,
    InterferenceConstraints,
    PowerPolicy,
    RabConfig,
    SystemSpec,
)
from underlay_sim.exceptions import DimensionError, NumericalError
from underlay_sim.numerics.rng import substream

LN2 = math.log(2.0)


def _policy(water_level: float, q_av: float = 1.0, q_p: float = math.inf, gbar_p: float = 10.0) -> PowerPolicy:
    return PowerPolicy(
        multiplier=1.0 / (water_level * LN2),
        constraints=InterferenceConstraints(q_av=q_av, q_p=q_p),
        pu_tx_power=gbar_p,
    )


class TestConstraints:
    """Tests for the interference constraint model."""

    def test_ratio(self) -> None:
        c = InterferenceConstraints.from_ratio(2.0, 1.5)
        assert c.q_p == 3.0
        assert c.rho == 1.5

    def test_infinite_peak(self) -> None:
        assert InterferenceConstraints(q_av=1.0).rho == math.inf

    def test_peak_below_average_rejected(self) -> None:
        with pytest.raises(ValidationError):
            InterferenceConstraints(q_av=2.0, q_p=1.0)


class TestAllocatePower:
    """Tests for the three-region allocation."""

    def test_below_cutoff(self) -> None:
        gamma = ChannelTriple(gamma_s=0.4, gamma_sp=1.0, gamma_ps=0.0)
        assert allocate_power(gamma, _policy(2.0)) == 0.0

    def test_water_filling(self) -> None:
        gamma = ChannelTriple(gamma_s=1.0, gamma_sp=1.0, gamma_ps=0.0)
        assert allocate_power(gamma, _policy(2.0)) == pytest.approx(1.0, rel=1e-14)

    def test_peak_clip(self) -> None:
        gamma = ChannelTriple(gamma_s=100.0, gamma_sp=1.0, gamma_ps=0.0)
        assert allocate_power(gamma, _policy(2.0, q_p=1.5)) == 1.5

    def test_region_boundaries(self) -> None:
        z0, z1 = region_boundaries(0.0, _policy(2.0, q_p=1.5))
        assert z0 == pytest.approx(0.5)
        assert z1 == pytest.approx(2.0)
        assert region_boundaries(0.0, _policy(2.0, q_p=3.0))[1] == math.inf

    def test_pu_interference_raises_cutoff(self) -> None:
        z0, _ = region_boundaries(0.1, _policy(2.0, gbar_p=10.0))
        assert z0 == pytest.approx(1.0)

    def test_peak_constraint_holds_exactly(self, rng: np.random.Generator) -> None:
        policy = _policy(5.0, q_av=0.3, q_p=0.7)
        g_s, g_sp, g_ps = rng.exponential(size=(3, 200_000))
        power = allocate_power_array(g_s, g_sp, g_ps, policy)
        assert np.all(power >= 0.0)
        assert np.all(power * g_sp <= 0.7)

    def test_zero_gain_capped(self) -> None:
        policy = PowerPolicy(
            multiplier=0.5,
            constraints=InterferenceConstraints(q_av=1.0),
            pu_tx_power=10.0,
            max_tx_power=1e6,
        )
        assert allocate_power(ChannelTriple(gamma_s=1.0, gamma_sp=0.0, gamma_ps=0.0), policy) == 1e6

    def test_monotone_in_gains(self) -> None:
        policy = _policy(3.0, q_p=4.0)
        grid = np.linspace(0.01, 10.0, 300)
        along_sp = allocate_power_array(2.0, grid, 0.2, policy)
        along_s = allocate_power_array(grid, 0.5, 0.2, policy)
        assert np.all(np.diff(along_sp) <= 0.0)
        assert np.all(np.diff(along_s) >= 0.0)

    def test_shape_mismatch(self) -> None:
        with pytest.raises(DimensionError):
            allocate_power_array(np.ones(3), np.ones(4), 0.0, _policy(1.0))


class TestSolveLambda:
    """Tests for Lagrange multiplier calibration."""

    def test_awgn_transmits_constant_power(self, awgn_system: SystemSpec, rng: np.random.Generator) -> None:
        policy = solve_lambda(awgn_system, InterferenceConstraints(q_av=2.0), 10_000, rng)
        g_s, g_sp, g_ps = draw_channel_samples(awgn_system, 1_000, rng)
        power = allocate_power_array(g_s, g_sp, g_ps, policy)
        np.testing.assert_allclose(power, 2.0, rtol=1e-3)

    def test_meets_average_on_held_out_samples(self, rayleigh_rayleigh: SystemSpec) -> None:
        constraints = InterferenceConstraints(q_av=1.0)
        policy = solve_lambda(rayleigh_rayleigh, constraints, 100_000, substream(1, 0))
        held_out = draw_channel_samples(rayleigh_rayleigh, 400_000, substream(1, 1))
        assert mean_interference(held_out, policy) == pytest.approx(1.0, rel=0.02)

    @pytest.mark.slow
    @pytest.mark.parametrize("rho", [1.2, math.inf])
    def test_held_out_accuracy_at_full_scale(self, rho: float, rayleigh_rayleigh: SystemSpec) -> None:
        runs = 1_000_000
        constraints = InterferenceConstraints.from_ratio(1.0, rho)
        policy = solve_lambda(rayleigh_rayleigh, constraints, runs, substream(11, 0))
        g_s, g_sp, g_ps = draw_channel_samples(rayleigh_rayleigh, runs, substream(11, 1))
        interference = g_sp * allocate_power_array(g_s, g_sp, g_ps, policy)
        assert np.all(interference <= constraints.q_p * (1.0 + 1e-9))
        # both sample sets contribute sampling noise of the same size
        floor = 3.0 * float(interference.std()) * math.sqrt(2.0 / runs) + 1e-4
        assert abs(float(interference.mean()) - 1.0) <= max(1e-3, floor)

    def test_calibration_set_hit(self, rician_rayleigh: SystemSpec) -> None:
        constraints = InterferenceConstraints.from_ratio(0.5, 2.0)
        policy = solve_lambda(rician_rayleigh, constraints, 20_000, substream(3, 0))
        # the same stream reproduces the frozen calibration set
        samples = draw_channel_samples(rician_rayleigh, 20_000, substream(3, 0))
        assert policy.constraints == constraints
        assert mean_interference(samples, policy) == pytest.approx(0.5, rel=1e-4)

    def test_larger_cap_never_lowers_capacity(self, rayleigh_rayleigh: SystemSpec) -> None:
        capacities = []
        for q_av in (0.5, 1.0, 2.0, 4.0):
            policy = solve_lambda(rayleigh_rayleigh, InterferenceConstraints(q_av=q_av), 20_000, substream(2, 0))
            capacities.append(ergodic_capacity_mc(rayleigh_rayleigh, policy, 20_000, substream(2, 1)).capacity)
        assert all(later >= earlier for earlier, later in zip(capacities, capacities[1:]))

    def test_peak_equal_to_average_is_peak_limited(self, rayleigh_rayleigh: SystemSpec) -> None:
        constraints = InterferenceConstraints(q_av=1.0, q_p=1.0)
        policy = solve_lambda(rayleigh_rayleigh, constraints, 10_000, substream(4, 0))
        samples = draw_channel_samples(rayleigh_rayleigh, 10_000, substream(4, 0))
        assert policy.water_level > constraints.q_p
        assert mean_interference(samples, policy) == pytest.approx(1.0, rel=1e-4)

    def test_too_few_runs(self, rayleigh_rayleigh: SystemSpec, rng: np.random.Generator) -> None:
        with pytest.raises(NumericalError):
            solve_lambda(rayleigh_rayleigh, InterferenceConstraints(q_av=1.0), 999, rng)

    def test_rab_requires_links(self, rayleigh_rayleigh: SystemSpec, rng: np.random.Generator) -> None:
        with pytest.raises(DimensionError):
            solve_lambda(rayleigh_rayleigh, InterferenceConstraints(q_av=1.0), 10_000, rng, rab=RabConfig())
