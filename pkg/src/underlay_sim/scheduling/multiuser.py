"""Parallel access channel: max-SINR scheduling, diversity gains and capacity scaling.

Every pair transmits with the peak-only power ``Q_p / gamma_sp``; in each
slot the pair with the largest SINR is scheduled.
"""

import logging
import math
from collections.abc import Callable, Iterator, Sequence

import numpy as np
import numpy.typing as npt
from scipy import optimize

from ..allocation.power import GAMMA_SP_FLOOR
from ..antennas.rab import draw_rab_links, sample_rab_triples
from ..channels.fading import rician_power_cdf, sample_triples, scenario_system
from ..core.executor import MonteCarloExecutor, StreamFamily
from ..core.models import (
    ChannelSpec,
    ChannelTriple,
    Column,
    PacNetwork,
    RabConfig,
    RabLinks,
    ResultTable,
    ScheduleDecision,
    Scenario,
    SystemSpec,
)
from ..exceptions import DimensionError, DomainError, NumericalError
from ..numerics.stats import MomentSummary, pool_estimates, summarize
from ..types import FloatArray, RandomStream
from ..utils.logging import log_dict

logger = logging.getLogger("underlay_sim.multiuser")

# Upper bound on rows * pairs held in memory at once
MAX_BATCH_ELEMENTS = 2**18
MIN_SCALE_XTOL = 1e-14
BRACKET_DOUBLINGS = 200
SCALING_STREAM_SLOTS = 2**16

REFERENCE_LABEL = "reference"

SCALING_COLUMNS = [
    Column(name="n"),
    Column(name="scenario"),
    Column(name="rab_mt"),
    Column(name="rab_mr"),
    Column(name="norm_capacity"),
    Column(name="norm_by_logN"),
    Column(name="norm_by_loglogN"),
    Column(name="std_err"),
]


def _batches(runs: int, pairs: int) -> Iterator[int]:
    rows = max(1, MAX_BATCH_ELEMENTS // max(pairs, 1))
    remaining = runs
    while remaining > 0:
        size = min(rows, remaining)
        yield size
        remaining -= size


# Scheduling
def pair_sinr(
    gamma_s: npt.ArrayLike,
    gamma_sp: npt.ArrayLike,
    gamma_ps: npt.ArrayLike,
    q_p: float,
    gbar_p: float,
) -> FloatArray:
    """SINR ``gamma_s (Q_p / gamma_sp) / (1 + gbar_p gamma_ps)`` of each pair."""
    g_sp = np.maximum(np.asarray(gamma_sp, dtype=np.float64), GAMMA_SP_FLOOR)
    g_s = np.asarray(gamma_s, dtype=np.float64)
    g_ps = np.asarray(gamma_ps, dtype=np.float64)
    return np.asarray(g_s * (q_p / g_sp) / (1.0 + gbar_p * g_ps), dtype=np.float64)


def schedule_array(
    gamma_s: npt.ArrayLike,
    gamma_sp: npt.ArrayLike,
    gamma_ps: npt.ArrayLike,
    q_p: float,
    gbar_p: float,
) -> tuple[npt.NDArray[np.intp], FloatArray]:
    """Vectorized max-SINR scheduling over the last axis (pairs).

    Returns:
        Scheduled indices (lowest index on ties) and their SINR

    Raises:
        DomainError: If there are no pairs to schedule
    """
    sinr = pair_sinr(gamma_s, gamma_sp, gamma_ps, q_p, gbar_p)
    if sinr.ndim == 0 or sinr.shape[-1] == 0:
        raise DomainError("cannot schedule an empty snapshot")
    index = np.argmax(sinr, axis=-1)
    best = np.take_along_axis(sinr, index[..., np.newaxis], axis=-1)[..., 0]
    return index, best


def schedule(snapshot: Sequence[ChannelTriple], q_p: float, gbar_p: float) -> ScheduleDecision:
    """Pick the pair with the largest SINR in one slot.

    Args:
        snapshot: Channel powers of the N pairs
        q_p: Peak interference cap
        gbar_p: PU transmit SNR

    Returns:
        Index of the scheduled pair and its SINR

    Raises:
        DomainError: If the snapshot is empty
    """
    if not snapshot:
        raise DomainError("cannot schedule an empty snapshot")
    gains = np.array([[t.gamma_s, t.gamma_sp, t.gamma_ps] for t in snapshot], dtype=np.float64)
    index, best = schedule_array(gains[:, 0], gains[:, 1], gains[:, 2], q_p, gbar_p)
    return ScheduleDecision(index=int(index), sinr=float(best))


def draw_network_samples(
    network: PacNetwork,
    size: int,
    rng: RandomStream,
    links: RabLinks | None = None,
) -> tuple[FloatArray, FloatArray, FloatArray]:
    """Channel powers of all pairs over ``size`` slots, each of shape ``(size, N)``.

    Raises:
        DimensionError: If RAB is configured without per-pair links, or the
            links cover a different number of pairs
    """
    n = network.n_pairs
    if network.rab is None:
        g_s, g_sp, g_ps = sample_triples(network.system, size * n, rng)
        return g_s.reshape(size, n), g_sp.reshape(size, n), g_ps.reshape(size, n)
    if links is None:
        raise DimensionError("RAB networks need per-pair LoS links")
    if links.su_su.phases.shape[:-2] != (n,):
        raise DimensionError(f"links cover {links.su_su.phases.shape[:-2]} pairs, network has {n}")
    return sample_rab_triples(network.system, network.rab, size, rng, links)


# Diversity gains
def _gain_ratio(
    draw: Callable[[int], FloatArray],
    runs: int,
    pairs: int,
) -> tuple[float, float]:
    """Mean per-slot maximum of ``draw(size)`` over its mean entry, with a delta-method standard error.

    Slots are i.i.d., so the error of ``mean(X) / mean(Y)`` is that of the
    residual ``X - ratio * Y`` divided by ``mean(Y)``, where ``X`` is the
    slot maximum and ``Y`` the slot average.
    """
    best_parts = []
    row_parts = []
    for size in _batches(runs, pairs):
        values = draw(size)
        best_parts.append(values.max(axis=1))
        row_parts.append(values.mean(axis=1))
    best = np.concatenate(best_parts)
    rows = np.concatenate(row_parts)
    denominator = float(rows.mean())
    if not denominator > 0.0:
        raise NumericalError(f"mean gain {denominator} is not positive")
    ratio = float(best.mean()) / denominator
    if runs < 2:
        return ratio, 0.0
    residual = best - ratio * rows
    return ratio, float(residual.std(ddof=1)) / (math.sqrt(runs) * denominator)


def md_gain_estimate(n: int, runs: int, rng: RandomStream) -> tuple[float, float]:
    """Multiuser-diversity gain of the reference network with its standard error."""
    if n < 1:
        raise DomainError(f"number of users must be >= 1, got {n}")
    if runs < 1:
        raise DomainError(f"runs must be >= 1, got {runs}")
    return _gain_ratio(lambda size: rng.exponential(1.0, size=(size, n)), runs, n)


def md_gain_reference(n: int, runs: int, rng: RandomStream) -> float:
    """Estimate ``E{max_n gamma_s,n} / gbar_s`` for Rayleigh SU-SU links (tends to H_N).

    Args:
        n: Number of users (>= 1)
        runs: Monte Carlo slots
        rng: Exclusive random stream

    Returns:
        Multiuser-diversity gain; exactly 1 for a single user
    """
    return md_gain_estimate(n, runs, rng)[0]


def pac_gain(
    network: PacNetwork,
    runs: int,
    rng: RandomStream,
    links: RabLinks | None = None,
) -> tuple[float, float]:
    """Combined MD/MID gain: mean SINR of the scheduled pair over the mean SINR of any pair.

    Both means are taken over the same slots, so a single pair gives
    exactly 1. With RAB and no ``links`` the per-pair LoS links are drawn
    from ``rng`` first.

    When ``gamma_sp`` has probability mass near zero (Rayleigh or Rician
    SU-PU links) ``E{1/gamma_sp}`` diverges: the scheduled SINR is driven by
    the smallest ``gamma_sp`` among the pairs and the gain grows roughly
    like N rather than like ``H_N``. The sample variance then converges
    slowly and the standard error is only indicative.

    Args:
        network: PAC description
        runs: Monte Carlo slots
        rng: Exclusive random stream
        links: Optional per-pair LoS links for RAB

    Returns:
        Gain ratio (>= 1 up to Monte Carlo error) and its standard error
    """
    if runs < 1:
        raise DomainError(f"runs must be >= 1, got {runs}")
    if network.rab is not None and links is None:
        links = draw_rab_links(network.system, network.rab, rng, pairs=network.n_pairs)

    def draw(size: int) -> FloatArray:
        g_s, g_sp, g_ps = draw_network_samples(network, size, rng, links)
        return pair_sinr(g_s, g_sp, g_ps, network.q_p, network.system.pu_tx_power)

    gain, std_err = _gain_ratio(draw, runs, network.n_pairs)
    log_dict(logger, logging.DEBUG, "PAC gain", {"n": network.n_pairs, "gain": gain, "std_err": std_err})
    return gain, std_err


# Growth-rate formulas
def _require_pairs(n: int) -> float:
    if n < 2:
        raise DomainError(f"growth-rate bounds need n >= 2, got {n}")
    return math.log(n)


def _los_shrink(n: int, k: float) -> float:
    return (math.sqrt(1.0 / (n * (k + 1.0))) + math.sqrt(k / (k + 1.0))) ** 2


def theorem2_bound(n: int, k_s: float, k_sp: float, k_ps: float) -> float:
    """Upper bound on the MD/MID gain growth with LoS on all links.

    The order terms are evaluated with unit constants, so only trends and
    ratios of this value are meaningful.
    """
    ln_n = _require_pairs(n)
    own = (math.sqrt(ln_n / (k_s + 1.0)) + math.sqrt(k_s / (k_s + 1.0))) ** 2 + math.log(ln_n)
    return own / (_los_shrink(n, k_sp) * _los_shrink(n, k_ps))


def theorem3_bound(n: int, k_s: float, m_t: int, m_r: int) -> float:
    """Upper bound on the MD/MID gain growth when both SU ends apply RAB."""
    ln_n = _require_pairs(n)
    if m_t < 1 or m_r < 1:
        raise DomainError(f"basis pattern counts must be >= 1, got m_t={m_t}, m_r={m_r}")
    fixed = math.sqrt(m_t * m_r * k_s / (k_s + 1.0))
    return n * n * ((math.sqrt(ln_n / (k_s + 1.0)) + fixed) ** 2 + math.log(ln_n))


def extreme_min_scale(n: int, spec: ChannelSpec) -> float:
    """Scale ``d_N = F^{-1}(1/N)`` of the minimum of N i.i.d. Rician channel powers.

    Args:
        n: Number of users (>= 2)
        spec: Link description

    Returns:
        The 1/N quantile of the channel power

    Raises:
        DomainError: If n < 2
        NumericalError: If no bracket for the quantile can be found
    """
    if n < 2:
        raise DomainError(f"extreme_min_scale needs n >= 2, got {n}")
    target = 1.0 / n

    def excess(d: float) -> float:
        return rician_power_cdf(d, spec) - target

    hi = spec.avg_power
    for _ in range(BRACKET_DOUBLINGS):
        if excess(hi) >= 0.0:
            break
        hi *= 2.0
    else:
        raise NumericalError(f"no bracket for the 1/{n} quantile of the channel power")
    return float(optimize.bisect(excess, 0.0, hi, xtol=MIN_SCALE_XTOL * hi, maxiter=500))


# Capacity scaling
def scaling_chunk_task(
    network: PacNetwork,
    links: RabLinks | None = None,
) -> Callable[[int, RandomStream], MomentSummary]:
    """Chunk task returning the moments of the scheduled pair's rate ``log2(1 + SINR*)``."""
    gbar_p = network.system.pu_tx_power

    def task(size: int, rng: RandomStream) -> MomentSummary:
        parts = []
        for rows in _batches(size, network.n_pairs):
            g_s, g_sp, g_ps = draw_network_samples(network, rows, rng, links)
            _, best = schedule_array(g_s, g_sp, g_ps, network.q_p, gbar_p)
            parts.append(summarize(np.log2(1.0 + best)))
        return pool_estimates(parts)

    return task


def scaling_capacities(
    system: SystemSpec,
    n_list: Sequence[int],
    runs: int,
    rng: RandomStream,
    q_p: float = 1.0,
    rab: RabConfig | None = None,
) -> dict[int, MomentSummary]:
    """Absolute sum capacity (bps/Hz) of the PAC for each N, on one stream.

    Per-pair LoS links for RAB are drawn from ``rng`` before each N.
    """
    capacities: dict[int, MomentSummary] = {}
    for n in n_list:
        network = PacNetwork(n_pairs=n, system=system, q_p=q_p, rab=rab)
        links = draw_rab_links(system, rab, rng, pairs=n) if rab is not None else None
        capacities[n] = scaling_chunk_task(network, links)(runs, rng)
    return capacities


async def scaling_capacities_parallel(
    system: SystemSpec,
    n_list: Sequence[int],
    runs: int,
    executor: MonteCarloExecutor,
    q_p: float = 1.0,
    rab: RabConfig | None = None,
) -> dict[int, MomentSummary]:
    """Same as :func:`scaling_capacities` on the executor's stream families.

    The i-th N measures on its own slice of the measurement family and
    draws its links from geometry stream i, so scenarios evaluated with
    the same ``n_list`` share random numbers.
    """
    capacities: dict[int, MomentSummary] = {}
    for index, n in enumerate(n_list):
        network = PacNetwork(n_pairs=n, system=system, q_p=q_p, rab=rab)
        links = None
        if rab is not None:
            links = draw_rab_links(system, rab, executor.stream(StreamFamily.GEOMETRY, index), pairs=n)
        task = scaling_chunk_task(network, links)
        parts = await executor.map_chunks(task, runs, StreamFamily.MEASUREMENT, offset=index * SCALING_STREAM_SLOTS)
        capacities[n] = pool_estimates(parts)
    return capacities


def _normalized_row(n: int, label: str, rab: RabConfig | None, norm: float, std_err: float) -> list[float | int | str]:
    by_log = norm / math.log(n) if n >= 2 else math.nan
    by_loglog = norm / math.log(math.log(n)) if n >= 3 else math.nan
    m_t, m_r = (rab.m_t, rab.m_r) if rab is not None else (0, 0)
    return [n, label, m_t, m_r, norm, by_log, by_loglog, std_err]


def append_scaling_rows(
    table: ResultTable,
    label: str,
    rab: RabConfig | None,
    n_list: Sequence[int],
    capacities: dict[int, MomentSummary],
) -> None:
    """Append rows normalized by the single-pair capacity ``capacities[1]``."""
    single = capacities[1].mean
    if single <= 0.0:
        raise NumericalError("single-pair capacity is zero; cannot normalize")
    for n in n_list:
        estimate = capacities[n]
        table.append(_normalized_row(n, label, rab, estimate.mean / single, estimate.std_err / single))


def append_reference_rows(
    table: ResultTable,
    n_list: Sequence[int],
    runs: int,
    rng: RandomStream,
    gbar_s: float = 1.0,
) -> None:
    """Append the reference network curve ``log2(1 + gbar_s G(N)) / log2(1 + gbar_s)``.

    ``G(N)`` is the multiuser-diversity gain from :func:`md_gain_reference`;
    the curve is the Jensen bound on the reference capacity and grows like
    ``ln ln N``.
    """
    single = math.log2(1.0 + gbar_s)
    for n in n_list:
        gain, gain_err = md_gain_estimate(n, runs, rng)
        norm = math.log2(1.0 + gbar_s * gain) / single
        std_err = gbar_s * gain_err / ((1.0 + gbar_s * gain) * math.log(2.0) * single)
        table.append(_normalized_row(n, REFERENCE_LABEL, None, norm, std_err))


def capacity_scaling_experiment(
    scenario: Scenario,
    rab: RabConfig | None,
    n_list: Sequence[int],
    runs: int,
    rng: RandomStream,
    k_factor: float = 10.0,
    gbar_s: float = 1.0,
    gbar_sp: float = 1.0,
    gbar_ps: float = 1.0,
    gbar_p: float = 10.0,
    q_p: float = 1.0,
    include_reference: bool = False,
) -> ResultTable:
    """Normalized PAC sum capacity versus the number of SU pairs.

    Each row holds ``C(N) / C(1)`` and the same value divided by ``ln N``
    and by ``ln ln N`` (NaN where those are not positive).

    Args:
        scenario: Fading scenario of the pairs
        rab: RAB configuration, or None
        n_list: Strictly ascending numbers of pairs
        runs: Monte Carlo slots per N
        rng: Exclusive random stream
        k_factor: Linear K-factor of Rician links
        gbar_s: Average SU-SU SNR
        gbar_sp: Average SU-PU power
        gbar_ps: Average PU-SU power
        gbar_p: PU transmit SNR
        q_p: Peak interference cap
        include_reference: Also emit the reference network curve

    Returns:
        Table with columns n, scenario, rab_mt, rab_mr, norm_capacity,
        norm_by_logN, norm_by_loglogN, std_err
    """
    if not n_list or any(n < 1 for n in n_list) or list(n_list) != sorted(set(n_list)):
        raise DomainError("n_list must be strictly ascending positive integers")
    system = scenario_system(scenario, k_factor, gbar_s, gbar_sp, gbar_ps, gbar_p)
    needed = sorted(set(n_list) | {1})
    capacities = scaling_capacities(system, needed, runs, rng, q_p, rab)

    table = ResultTable(
        columns=list(SCALING_COLUMNS),
        metadata={"experiment": "capacity_scaling", "runs": str(runs), "q_p": f"{q_p:g}"},
    )
    append_scaling_rows(table, scenario.value, rab, n_list, capacities)
    if include_reference:
        append_reference_rows(table, n_list, runs, rng, gbar_s)
    log_dict(
        logger,
        logging.DEBUG,
        "Capacity scaling evaluated",
        {"scenario": scenario.value, "rab": rab is not None, "n_max": n_list[-1], "runs": runs},
    )
    return table
