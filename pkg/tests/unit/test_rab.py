"""Unit tests for random aerial beamforming."""

import math

import numpy as np
import pytest

from underlay_sim.antennas.rab import (
    artificial_fading_cdf,
    artificial_fading_component,
    draw_los_matrix,
    draw_rab_links,
    draw_scatterers,
    draw_weights,
    equivalent_channel,
    nulling_probability,
    phases_to_weights,
    sample_artificial_fading,
    sample_equivalent_channels,
    sample_los_averaged_channels,
    sample_rab_triples,
    smart_receive_vector,
    smart_receive_weights,
)
from underlay_sim.channels.fading import AWGN_K_FACTOR
from underlay_sim.core.models import ChannelSpec, RabConfig, ReceiveMode, SystemSpec
from underlay_sim.exceptions import DimensionError, DomainError
from underlay_sim.numerics.stats import ks_statistic, rayleigh_ks


class TestWeights:
    """Tests for random basis weights."""

    def test_single_pattern(self, rng: np.random.Generator) -> None:
        w = draw_weights(1, rng)
        assert w.shape == (1,)
        assert abs(w[0]) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("m", [1, 2, 5, 16])
    def test_unit_norm(self, m: int, rng: np.random.Generator) -> None:
        assert np.sum(np.abs(draw_weights(m, rng)) ** 2) == pytest.approx(1.0, abs=1e-12)

    def test_uniform_phases(self, rng: np.random.Generator) -> None:
        phases = np.concatenate([np.angle(draw_weights(4, rng)) for _ in range(100_000)])
        u = np.mod(phases, 2.0 * math.pi) / (2.0 * math.pi)
        assert ks_statistic(u, lambda x: np.clip(x, 0.0, 1.0)) < 0.01

    def test_rejects_zero_patterns(self, rng: np.random.Generator) -> None:
        with pytest.raises(DomainError):
            draw_weights(0, rng)


class TestSingleSlot:
    """Tests for the single-slot channel synthesis."""

    def test_deterministic_without_randomization(self, rng: np.random.Generator) -> None:
        cfg = RabConfig(m_t=1, m_r=1)
        spec = ChannelSpec(k_factor=AWGN_K_FACTOR, avg_power=2.0)
        los = draw_los_matrix(1, 1, spec.avg_power, rng)
        for _ in range(20):
            h = equivalent_channel(
                cfg, spec, los, draw_scatterers(spec, cfg, rng), draw_weights(1, rng), draw_weights(1, rng)
            )
            assert abs(h) == pytest.approx(math.sqrt(2.0), rel=1e-5)

    def test_single_phasor_magnitude(self, rng: np.random.Generator) -> None:
        cfg = RabConfig(m_t=1, m_r=1)
        spec = ChannelSpec(k_factor=10.0, avg_power=1.0)
        los = draw_los_matrix(1, 1, 1.0, rng)
        u = artificial_fading_component(cfg, spec, los, draw_weights(1, rng), draw_weights(1, rng))
        assert abs(u) == pytest.approx(math.sqrt(10.0 / 11.0), rel=1e-12)

    def test_dimension_mismatch(self, rng: np.random.Generator) -> None:
        cfg = RabConfig(m_t=2, m_r=3)
        spec = ChannelSpec(k_factor=10.0)
        los = draw_los_matrix(3, 2, 1.0, rng)
        with pytest.raises(DimensionError):
            artificial_fading_component(cfg, spec, los, draw_weights(2, rng), draw_weights(2, rng))
        with pytest.raises(DimensionError):
            artificial_fading_component(cfg, spec, draw_los_matrix(4, 4, 1.0, rng), np.ones(4), np.ones(4))

    def test_scatterers_have_configured_count(self, rng: np.random.Generator) -> None:
        cfg = RabConfig(m_t=3, m_r=2, scatterers=7)
        scatterers = draw_scatterers(ChannelSpec(k_factor=1.0), cfg, rng)
        assert scatterers.count == 7
        assert scatterers.responses_t.shape == (3, 7)
        assert scatterers.responses_r.shape == (2, 7)

    def test_scattered_power_matches_gain_law(self, rng: np.random.Generator) -> None:
        cfg = RabConfig(m_t=3, m_r=3)
        spec = ChannelSpec(k_factor=0.0, avg_power=2.0)
        los = draw_los_matrix(3, 3, spec.avg_power, rng)
        h = np.array(
            [
                equivalent_channel(
                    cfg, spec, los, draw_scatterers(spec, cfg, rng), draw_weights(3, rng), draw_weights(3, rng)
                )
                for _ in range(10_000)
            ]
        )
        assert np.mean(np.abs(h) ** 2) == pytest.approx(2.0, rel=0.05)


class TestEquivalentChannels:
    """Tests for the vectorized equivalent channel sampler."""

    def test_rayleigh_without_los(self, rng: np.random.Generator) -> None:
        spec = ChannelSpec(k_factor=0.0, avg_power=1.5)
        los = draw_los_matrix(3, 3, spec.avg_power, rng)
        h = sample_equivalent_channels(spec, los, 100_000, rng)
        assert rayleigh_ks(np.abs(h), 1.5) < 0.01

    @pytest.mark.parametrize("k", [1.0, 10.0, 100.0])
    def test_many_patterns_give_rayleigh(self, k: float, rng: np.random.Generator) -> None:
        spec = ChannelSpec(k_factor=k, avg_power=1.0)
        los = draw_los_matrix(8, 8, spec.avg_power, rng)
        h = sample_equivalent_channels(spec, los, 100_000, rng)
        assert rayleigh_ks(np.abs(h), 1.0) < 0.01
        assert abs(np.mean(h)) < 0.01

    @pytest.mark.parametrize("seed", range(8))
    def test_five_patterns_close_to_rayleigh(self, seed: int) -> None:
        rng = np.random.default_rng(seed)
        spec = ChannelSpec(k_factor=10.0, avg_power=1.0)
        h5 = sample_los_averaged_channels(spec, 5, 5, 200_000, rng)
        h1 = sample_los_averaged_channels(spec, 1, 1, 200_000, rng)
        assert rayleigh_ks(np.abs(h5), 1.0) < 0.01
        assert rayleigh_ks(np.abs(h1), 1.0) > 0.1

    def test_los_averaged_pair_shape_and_power(self, rng: np.random.Generator) -> None:
        spec = ChannelSpec(k_factor=10.0, avg_power=2.0)
        h = sample_los_averaged_channels(spec, 3, 2, 100_000, rng, ReceiveMode.RANDOM)
        assert h.shape == (100_000,)
        assert np.mean(np.abs(h) ** 2) == pytest.approx(2.0, rel=0.02)

    @pytest.mark.parametrize(("m_t", "m_r", "k"), [(1, 1, 10.0), (2, 3, 1.0), (4, 4, 100.0), (8, 2, 10.0)])
    def test_average_power_preserved(self, m_t: int, m_r: int, k: float, rng: np.random.Generator) -> None:
        spec = ChannelSpec(k_factor=k, avg_power=3.0)
        h = sample_equivalent_channels(spec, draw_los_matrix(m_r, m_t, 3.0, rng), 200_000, rng)
        assert np.mean(np.abs(h) ** 2) == pytest.approx(3.0, rel=0.01)

    def test_pair_axis(self, rng: np.random.Generator) -> None:
        spec = ChannelSpec(k_factor=10.0)
        los = draw_los_matrix(2, 3, 1.0, rng, pairs=6)
        assert sample_equivalent_channels(spec, los, 50, rng).shape == (50, 6)


class TestArtificialFading:
    """Tests for the LoS component after randomization."""

    def test_two_phasor_arcsine_law(self, rng: np.random.Generator) -> None:
        spec = ChannelSpec(k_factor=10.0, avg_power=1.0)
        u = sample_artificial_fading(spec, draw_los_matrix(1, 2, 1.0, rng), 1_000_000, rng)
        assert ks_statistic(np.abs(u), lambda r: artificial_fading_cdf(r, 10.0, 1.0)) < 0.01

    def test_arcsine_cdf_support(self) -> None:
        top = math.sqrt(2.0 * 10.0 / 11.0)
        values = artificial_fading_cdf([0.0, top / 2.0, top, 2.0 * top], 10.0, 1.0)
        assert values[0] == 0.0
        assert 0.0 < values[1] < 1.0
        assert values[2] == pytest.approx(1.0)
        assert values[3] == 1.0

    def test_many_phasors_are_gaussian(self, rng: np.random.Generator) -> None:
        spec = ChannelSpec(k_factor=10.0, avg_power=1.0)
        u = sample_artificial_fading(spec, draw_los_matrix(8, 8, 1.0, rng), 100_000, rng)
        assert rayleigh_ks(np.abs(u), 10.0 / 11.0) < 0.01


class TestSmartReceive:
    """Tests for co-phased receive weights."""

    def test_single_transmit_pattern_is_coherent(self, rng: np.random.Generator) -> None:
        m_r = 4
        cfg = RabConfig(m_t=1, m_r=m_r, receive_mode=ReceiveMode.SMART)
        spec = ChannelSpec(k_factor=10.0, avg_power=2.0)
        los = draw_los_matrix(m_r, 1, spec.avg_power, rng)
        w_t = draw_weights(1, rng)
        a = smart_receive_vector(los, w_t)
        np.testing.assert_allclose(np.abs(a), 1.0, atol=1e-14)
        w_r = phases_to_weights(smart_receive_weights(a))
        u = artificial_fading_component(cfg, spec, los, w_r, w_t)
        assert u.real == pytest.approx(math.sqrt(m_r * 10.0 * 2.0 / 11.0), rel=1e-12)
        assert abs(u.imag) < 1e-12

    def test_result_is_real_non_negative(self, rng: np.random.Generator) -> None:
        cfg = RabConfig(m_t=3, m_r=5, receive_mode=ReceiveMode.SMART)
        spec = ChannelSpec(k_factor=10.0, avg_power=1.0)
        los = draw_los_matrix(5, 3, 1.0, rng)
        for _ in range(50):
            w_t = draw_weights(3, rng)
            w_r = phases_to_weights(smart_receive_weights(smart_receive_vector(los, w_t)))
            u = artificial_fading_component(cfg, spec, los, w_r, w_t)
            assert abs(u.imag) < 1e-12
            assert u.real >= 0.0

    def test_fluctuations_shrink_with_receive_patterns(self, rng: np.random.Generator) -> None:
        spec = ChannelSpec(k_factor=10.0, avg_power=1.0)
        spreads = []
        for m_r in (1, 2, 4, 8):
            los = draw_los_matrix(m_r, 2, 1.0, rng, pairs=200)
            envelope = np.abs(sample_equivalent_channels(spec, los, 2_000, rng, ReceiveMode.SMART))
            # relative spread per pair, averaged over LoS draws
            spreads.append(float(np.mean(envelope.std(axis=0) / envelope.mean(axis=0))))
        assert all(later < earlier for earlier, later in zip(spreads, spreads[1:]))

    def test_interference_link_stays_randomized(self, rng: np.random.Generator) -> None:
        system = SystemSpec(
            su_su=ChannelSpec(k_factor=10.0),
            su_pu=ChannelSpec(k_factor=10.0),
            pu_su=ChannelSpec(k_factor=10.0),
        )
        cfg = RabConfig(m_t=8, m_r=8, receive_mode=ReceiveMode.SMART)
        links = draw_rab_links(system, cfg, rng)
        _, _, gamma_ps = sample_rab_triples(system, cfg, 100_000, rng, links)
        # eight receive phasors feed the PU-SU link, so allow their finite-sum deviation
        assert rayleigh_ks(np.sqrt(gamma_ps), 1.0) < 0.04


class TestRabTriples:
    """Tests for joint RAB channel powers."""

    def test_link_shapes(self, rng: np.random.Generator, rician_rayleigh: SystemSpec) -> None:
        cfg = RabConfig(m_t=2, m_r=3)
        links = draw_rab_links(rician_rayleigh, cfg, rng, pairs=4)
        assert links.su_su.phases.shape == (4, 3, 2)
        assert links.su_pu.phases.shape == (4, 1, 2)
        assert links.pu_su.phases.shape == (4, 3, 1)
        triples = sample_rab_triples(rician_rayleigh, cfg, 10, rng, links)
        assert all(t.shape == (10, 4) for t in triples)

    def test_averages_preserved(self, rng: np.random.Generator, rician_rayleigh: SystemSpec) -> None:
        cfg = RabConfig(m_t=3, m_r=3)
        links = draw_rab_links(rician_rayleigh, cfg, rng)
        gamma_s, gamma_sp, gamma_ps = sample_rab_triples(rician_rayleigh, cfg, 200_000, rng, links)
        for values in (gamma_s, gamma_sp, gamma_ps):
            assert np.mean(values) == pytest.approx(1.0, rel=0.02)


class TestNulling:
    """Tests for opportunistic nulling probabilities."""

    def test_rayleigh_limit_closed_form(self, rng: np.random.Generator) -> None:
        result = nulling_probability(None, 10.0, 1.0, 0.1, rng)
        assert result.draws == 10_000_000
        assert result.epsilon_closed == pytest.approx(1.0 - math.exp(-0.011), rel=1e-12)
        assert result.epsilon_closed == pytest.approx(0.01094, abs=1e-5)
        assert abs(result.epsilon_mc - result.epsilon_closed) < 3.0 * result.std_err

    def test_two_patterns_closed_vs_monte_carlo(self, rng: np.random.Generator) -> None:
        result = nulling_probability(2, 10.0, 1.0, 0.1, rng)
        assert result.draws == 10_000_000
        assert result.epsilon_closed is not None
        assert abs(result.epsilon_mc - result.epsilon_closed) < 3.0 * result.std_err

    def test_full_support(self, rng: np.random.Generator) -> None:
        top = math.sqrt(2.0 * 10.0 / 11.0)
        assert nulling_probability(2, 10.0, 1.0, top, rng, draws=1_000).epsilon_closed == pytest.approx(1.0)

    @pytest.mark.parametrize("delta", [0.05, 0.1, 0.2])
    def test_two_patterns_null_more_often(self, delta: float, rng: np.random.Generator) -> None:
        two = nulling_probability(2, 10.0, 1.0, delta, rng, draws=1_000_000)
        many = nulling_probability(None, 10.0, 1.0, delta, rng, draws=1_000_000)
        assert two.epsilon_closed is not None and many.epsilon_closed is not None
        assert two.epsilon_closed > many.epsilon_closed
        assert two.epsilon_mc > many.epsilon_mc

    def test_no_closed_form_for_three(self, rng: np.random.Generator) -> None:
        result = nulling_probability(3, 10.0, 1.0, 0.1, rng, draws=10_000)
        assert result.epsilon_closed is None
        assert result.draws == 10_000

    @pytest.mark.parametrize(("m_t", "k", "delta"), [(2, 10.0, 0.0), (2, 0.0, 0.1), (0, 10.0, 0.1)])
    def test_invalid_arguments(self, m_t: int, k: float, delta: float, rng: np.random.Generator) -> None:
        with pytest.raises(DomainError):
            nulling_probability(m_t, k, 1.0, delta, rng, draws=10)
