"""Ergodic SU capacity: Monte Carlo, semi-analytic quadrature and closed-form limits."""

import logging
import math
from collections.abc import Callable, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import integrate

from ..core.executor import MonteCarloExecutor, StreamFamily
from ..core.models import (
    CapacityEstimate,
    CapacityPoint,
    InterferenceConstraints,
    Lemma1Bounds,
    PowerPolicy,
    RabConfig,
    RabLinks,
    SystemSpec,
)
from ..exceptions import DomainError, NumericalError
from ..numerics.specfun import EULER_GAMMA, exp_integral_e1
from ..numerics.stats import MomentSummary, pool_estimates, summarize
from ..types import Density, FloatArray, RandomStream
from ..utils.logging import log_dict
from .power import LN2, MIN_CALIBRATION_RUNS, allocate_power_array, draw_channel_samples, region_boundaries, solve_lambda

logger = logging.getLogger("underlay_sim.capacity")

SEQUENTIAL_BATCH = 65_536


class CapacityPartial(BaseModel):
    """Partial capacity statistics of one Monte Carlo chunk."""

    model_config = ConfigDict(frozen=True)

    rates: MomentSummary
    interference: MomentSummary
    peak: float = Field(default=0.0, ge=0.0)


def rate_samples(
    samples: tuple[FloatArray, FloatArray, FloatArray],
    policy: PowerPolicy,
) -> tuple[FloatArray, FloatArray]:
    """Instantaneous rates ``log2(1 + gamma_s P / (1 + gamma_ps gbar_p))`` and interference ``gamma_sp P``."""
    g_s, g_sp, g_ps = samples
    power = allocate_power_array(g_s, g_sp, g_ps, policy)
    sinr = g_s * power / (1.0 + g_ps * policy.pu_tx_power)
    return np.log2(1.0 + sinr), g_sp * power


def capacity_chunk_task(
    system: SystemSpec,
    policy: PowerPolicy,
    rab: RabConfig | None = None,
    links: RabLinks | None = None,
) -> Callable[[int, RandomStream], CapacityPartial]:
    """Chunk task measuring capacity under a fixed policy."""

    def task(size: int, rng: RandomStream) -> CapacityPartial:
        samples = draw_channel_samples(system, size, rng, rab, links)
        rates, interference = rate_samples(samples, policy)
        return CapacityPartial(
            rates=summarize(rates),
            interference=summarize(interference),
            peak=float(interference.max()) if interference.size else 0.0,
        )

    return task


def combine_partials(parts: Sequence[CapacityPartial]) -> CapacityEstimate:
    """Pool chunk partials (in the given order) into one estimate."""
    rates = pool_estimates([p.rates for p in parts])
    interference = pool_estimates([p.interference for p in parts])
    return CapacityEstimate(
        capacity=rates.mean,
        std_err=rates.std_err,
        runs=max(rates.count, 1),
        mean_interference=max(interference.mean, 0.0),
        peak_interference=max((p.peak for p in parts), default=0.0),
    )


def ergodic_capacity_mc(
    system: SystemSpec,
    policy: PowerPolicy,
    runs: int,
    rng: RandomStream,
    rab: RabConfig | None = None,
    links: RabLinks | None = None,
) -> CapacityEstimate:
    """Monte Carlo ergodic capacity on a single stream.

    The policy must be calibrated on an independent sample set.

    Args:
        system: Channel description
        policy: Calibrated power policy
        runs: Number of channel realizations
        rng: Exclusive random stream
        rab: Optional RAB configuration
        links: LoS beamspace links (required with ``rab``)

    Returns:
        Capacity in bps/Hz with its standard error
    """
    task = capacity_chunk_task(system, policy, rab, links)
    parts = []
    remaining = runs
    while remaining > 0:
        size = min(SEQUENTIAL_BATCH, remaining)
        parts.append(task(size, rng))
        remaining -= size
    return combine_partials(parts)


async def estimate_capacity(
    system: SystemSpec,
    policy: PowerPolicy,
    runs: int,
    executor: MonteCarloExecutor,
    rab: RabConfig | None = None,
    links: RabLinks | None = None,
) -> CapacityEstimate:
    """Parallel Monte Carlo capacity on the measurement stream family."""
    task = capacity_chunk_task(system, policy, rab, links)
    parts = await executor.map_chunks(task, runs, StreamFamily.MEASUREMENT)
    return combine_partials(parts)


async def capacity_sweep(
    system: SystemSpec,
    q_av_list: Sequence[float],
    rho: float,
    runs: int,
    executor: MonteCarloExecutor,
    rab: RabConfig | None = None,
    links: RabLinks | None = None,
    max_tx_power: float = 1e12,
) -> list[CapacityPoint]:
    """Capacity over a grid of average interference caps at a fixed ``rho = Q_p / Q_av``.

    Each point calibrates lambda on calibration stream ``i`` and measures on
    the shared measurement family, so points and scenarios share random
    numbers.

    Args:
        system: Channel description
        q_av_list: Average interference caps (linear)
        rho: Peak-to-average ratio (``inf`` for no peak cap)
        runs: Monte Carlo runs per point
        executor: Monte Carlo executor
        rab: Optional RAB configuration
        links: LoS beamspace links (required with ``rab``)
        max_tx_power: Numerical cap on the SU transmit power

    Returns:
        One point per cap, in input order
    """
    points: list[CapacityPoint] = []
    calibration_runs = max(runs, MIN_CALIBRATION_RUNS)
    for index, q_av in enumerate(q_av_list):
        constraints = InterferenceConstraints.from_ratio(q_av, rho)
        rng = executor.stream(StreamFamily.CALIBRATION, index)
        policy = await executor.run_blocking(
            solve_lambda, system, constraints, calibration_runs, rng, rab, links, max_tx_power
        )
        estimate = await estimate_capacity(system, policy, runs, executor, rab, links)
        points.append(CapacityPoint(q_av=q_av, rho=rho, multiplier=policy.multiplier, estimate=estimate))
        log_dict(
            logger,
            logging.DEBUG,
            "Sweep point",
            {"q_av": f"{q_av:.4g}", "rho": rho, "capacity": f"{estimate.capacity:.4f}"},
        )
    return points


# Semi-analytic evaluation
class PointMass:
    """Degenerate distribution concentrated at ``value`` (deterministic channel).

    Evaluating it as a density returns zero; the quadrature replaces the
    integral by evaluation at ``value``.
    """

    def __init__(self, value: float):
        if not math.isfinite(value) or value < 0.0:
            raise DomainError(f"point mass location must be finite and >= 0, got {value}")
        self.value = float(value)

    def __call__(self, x: float) -> float:
        return 0.0

    def __repr__(self) -> str:
        return f"PointMass({self.value})"


def _quad(fn: Callable[[float], float], a: float, b: float, tol: float) -> float:
    """Adaptive quadrature that fails loudly when the error estimate stays too large."""
    if b <= a:
        return 0.0
    result = integrate.quad(fn, a, b, epsabs=tol, epsrel=max(tol, 1e-10), limit=200, full_output=1)
    value, abserr = float(result[0]), float(result[1])
    if len(result) > 3 and abserr > max(1e3 * tol, 1e-6 * abs(value)):
        raise NumericalError(
            f"quadrature on [{a:.4g}, {b:.4g}] did not converge: achieved error {abserr:.3g}, requested {tol:.1g}"
        )
    return value


def _quad_halfline(fn: Callable[[float], float], a: float, b: float, tol: float, split: float) -> float:
    """Quadrature with a split point inside long or infinite intervals."""
    if math.isinf(b) and split > a:
        return _quad(fn, a, split, tol) + _quad(fn, split, b, tol)
    return _quad(fn, a, b, tol)


def _rate_at(z: float, noise: float, policy: PowerPolicy, z0: float, z1: float) -> float:
    if z <= z0:
        return 0.0
    if z <= z1:
        return math.log2(policy.water_level * z / noise)
    return math.log2(1.0 + policy.constraints.q_p * z / noise)


def capacity_semianalytic(
    f_z: Density,
    f_gps: Density,
    policy: PowerPolicy,
    quadrature_tol: float = 1e-8,
) -> float:
    """Ergodic capacity by double quadrature over ``gamma_ps`` and ``z = gamma_s / gamma_sp``.

    The inner integral covers the water-filling region ``[z0, z1]`` and the
    peak region ``[z1, inf)``. Either density may be a :class:`PointMass`.

    Args:
        f_z: Density of z
        f_gps: Density of the PU-SU channel power
        policy: Calibrated power policy
        quadrature_tol: Absolute quadrature tolerance

    Returns:
        Capacity in bps/Hz

    Raises:
        NumericalError: If a quadrature does not converge
    """
    inner_tol = quadrature_tol / 10.0

    def inner(gamma_ps: float) -> float:
        noise = 1.0 + gamma_ps * policy.pu_tx_power
        z0, z1 = region_boundaries(gamma_ps, policy)
        if isinstance(f_z, PointMass):
            return _rate_at(f_z.value, noise, policy, z0, z1)
        split = max(2.0 * z0, 1.0)
        water = _quad_halfline(
            lambda z: math.log2(policy.water_level * z / noise) * f_z(z), z0, z1, inner_tol, split
        )
        peak = 0.0
        if math.isfinite(z1):
            peak = _quad_halfline(
                lambda z: math.log2(1.0 + policy.constraints.q_p * z / noise) * f_z(z),
                z1,
                math.inf,
                inner_tol,
                max(2.0 * z1, 1.0),
            )
        return water + peak

    if isinstance(f_gps, PointMass):
        return inner(f_gps.value)
    return _quad_halfline(lambda y: f_gps(y) * inner(y), 0.0, math.inf, quadrature_tol, 1.0)


# Closed forms
def awgn_capacity(q_av: float, gbar_s: float, gbar_sp: float, gbar_ps: float, gbar_p: float) -> float:
    """SU capacity when every link is deterministic (AWGN)."""
    return math.log2(1.0 + (q_av / gbar_sp) * gbar_s / (1.0 + gbar_p * gbar_ps))


def awgn_lagrange_multiplier(q_av: float, gbar_s: float, gbar_sp: float, gbar_ps: float, gbar_p: float) -> float:
    """Multiplier of the all-AWGN problem: ``1 / (lambda ln 2) = Q_av + gbar_sp (1 + gbar_ps gbar_p) / gbar_s``."""
    water = q_av + gbar_sp * (1.0 + gbar_ps * gbar_p) / gbar_s
    return 1.0 / (water * LN2)


def lemma1_asymptotics(
    policy: PowerPolicy,
    gbar_s: float,
    gbar_sp: float,
    gbar_ps: float,
    gbar_p: float,
) -> Lemma1Bounds:
    """Rician-Rayleigh capacity with deterministic interference links and no peak cap.

    ``exact = E1(s) / ln 2`` with ``s = lambda ln2 (gbar_ps gbar_p + 1) gbar_sp / gbar_s``.
    The high-SNR form sits ``gamma`` nats (``gamma / ln 2`` bits) below the AWGN capacity;
    the low-SNR form is ``e^{-s} / (s ln 2)`` at the AWGN multiplier.

    Raises:
        DomainError: If the policy has a finite peak cap
    """
    if math.isfinite(policy.constraints.q_p):
        raise DomainError("lemma1_asymptotics assumes an infinite peak interference cap")
    noise = gbar_ps * gbar_p + 1.0
    s = policy.multiplier * LN2 * noise * gbar_sp / gbar_s
    q_av = policy.constraints.q_av
    lambda_awgn = awgn_lagrange_multiplier(q_av, gbar_s, gbar_sp, gbar_ps, gbar_p)
    s_awgn = lambda_awgn * LN2 * noise * gbar_sp / gbar_s
    c_awgn = awgn_capacity(q_av, gbar_s, gbar_sp, gbar_ps, gbar_p)
    return Lemma1Bounds(
        s=s,
        s_awgn=s_awgn,
        exact=exp_integral_e1(s) / LN2,
        awgn_capacity=c_awgn,
        high_snr_bound=c_awgn - EULER_GAMMA / LN2,
        low_snr_bound=math.exp(-s_awgn) / (s_awgn * LN2),
    )
