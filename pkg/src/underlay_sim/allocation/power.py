"""Optimal SU power allocation under average and peak interference constraints."""

import logging
import math

import numpy as np
import numpy.typing as npt
from scipy import optimize

from ..antennas.rab import sample_rab_triples
from ..channels.fading import sample_triples
from ..core.models import ChannelTriple, InterferenceConstraints, PowerPolicy, RabConfig, RabLinks, SystemSpec
from ..exceptions import DimensionError, NumericalError
from ..types import FloatArray, RandomStream
from ..utils.logging import log_dict

logger = logging.getLogger("underlay_sim.power")

GAMMA_SP_FLOOR = 1e-12
LAMBDA_BRACKET = (1e-9, 1e9)
CALIBRATION_RTOL = 1e-4
MIN_CALIBRATION_RUNS = 10_000

LN2 = math.log(2.0)


def allocate_power_array(
    gamma_s: npt.ArrayLike,
    gamma_sp: npt.ArrayLike,
    gamma_ps: npt.ArrayLike,
    policy: PowerPolicy,
) -> FloatArray:
    """Vectorized optimal SU transmit power.

    ``P = clip(W / gamma_sp - (1 + gamma_ps gbar_p) / gamma_s, 0, Q_p / gamma_sp)``
    with water level ``W = 1 / (lambda ln 2)``. This is zero below ``z0``,
    water-filling between ``z0`` and ``z1`` and the peak cap above ``z1``.
    The result never exceeds ``policy.max_tx_power``.
    """
    g_s = np.asarray(gamma_s, dtype=np.float64)
    g_sp = np.maximum(np.asarray(gamma_sp, dtype=np.float64), GAMMA_SP_FLOOR)
    g_ps = np.asarray(gamma_ps, dtype=np.float64)
    try:
        g_s, g_sp, g_ps = np.broadcast_arrays(g_s, g_sp, g_ps)
    except ValueError as e:
        raise DimensionError(f"channel arrays do not broadcast: {e}") from e

    noise = 1.0 + g_ps * policy.pu_tx_power
    with np.errstate(divide="ignore"):
        water = policy.water_level / g_sp - noise / g_s
    q_p = policy.constraints.q_p
    if math.isinf(q_p):
        power = np.maximum(water, 0.0)
    else:
        cap = q_p / g_sp
        # Round the cap down so that cap * gamma_sp <= Q_p holds in floating point
        for _ in range(2):
            over = cap * g_sp > q_p
            cap = np.where(over, np.nextafter(cap, 0.0), cap)
        power = np.clip(water, 0.0, cap)
    return np.asarray(np.minimum(power, policy.max_tx_power), dtype=np.float64)


def allocate_power(gamma: ChannelTriple, policy: PowerPolicy) -> float:
    """Optimal SU transmit power for one channel realization.

    Args:
        gamma: Channel powers (gamma_s, gamma_sp, gamma_ps)
        policy: Calibrated policy

    Returns:
        Transmit power with ``P >= 0`` and ``P * gamma_sp <= Q_p``
    """
    return float(allocate_power_array(gamma.gamma_s, gamma.gamma_sp, gamma.gamma_ps, policy))


def region_boundaries(gamma_ps: float, policy: PowerPolicy) -> tuple[float, float]:
    """Boundaries ``(z0, z1)`` of the zero, water-filling and peak regions in ``z = gamma_s / gamma_sp``."""
    noise = 1.0 + gamma_ps * policy.pu_tx_power
    z0 = noise / policy.water_level
    excess = policy.water_level - policy.constraints.q_p
    z1 = noise / excess if excess > 0.0 else math.inf
    return z0, z1


def draw_channel_samples(
    system: SystemSpec,
    size: int,
    rng: RandomStream,
    rab: RabConfig | None = None,
    links: RabLinks | None = None,
) -> tuple[FloatArray, FloatArray, FloatArray]:
    """Channel-power samples with or without RAB.

    Raises:
        DimensionError: If ``rab`` is given without LoS ``links``
    """
    if rab is None:
        return sample_triples(system, size, rng)
    if links is None:
        raise DimensionError("RAB sampling needs the LoS beamspace links")
    return sample_rab_triples(system, rab, size, rng, links)


def mean_interference(
    samples: tuple[FloatArray, FloatArray, FloatArray],
    policy: PowerPolicy,
) -> float:
    """Empirical ``E{gamma_sp P}`` over a sample set."""
    g_s, g_sp, g_ps = samples
    power = allocate_power_array(g_s, g_sp, g_ps, policy)
    return float(np.mean(np.asarray(g_sp) * power))


def solve_lambda(
    system: SystemSpec,
    constraints: InterferenceConstraints,
    runs: int,
    rng: RandomStream,
    rab: RabConfig | None = None,
    links: RabLinks | None = None,
    max_tx_power: float = 1e12,
) -> PowerPolicy:
    """Calibrate the Lagrange multiplier so that ``E{gamma_sp P} = Q_av``.

    The samples are drawn once and frozen, so the bisection (on ``ln lambda``)
    runs on a deterministic, monotonically decreasing function.

    Args:
        system: Channel description
        constraints: Interference caps
        runs: Size of the calibration sample set (>= 10^4)
        rng: Stream reserved for calibration
        rab: Optional RAB configuration
        links: LoS beamspace links (required with ``rab``)
        max_tx_power: Numerical cap on the SU transmit power

    Returns:
        Calibrated power policy

    Raises:
        NumericalError: If runs is too small or the constraint cannot be met
    """
    if runs < MIN_CALIBRATION_RUNS:
        raise NumericalError(f"calibration needs at least {MIN_CALIBRATION_RUNS} runs, got {runs}")
    samples = draw_channel_samples(system, runs, rng, rab, links)

    def policy_for(log_lambda: float) -> PowerPolicy:
        return PowerPolicy(
            multiplier=math.exp(log_lambda),
            constraints=constraints,
            pu_tx_power=system.pu_tx_power,
            max_tx_power=max_tx_power,
        )

    def excess(log_lambda: float) -> float:
        return mean_interference(samples, policy_for(log_lambda)) - constraints.q_av

    lo, hi = (math.log(v) for v in LAMBDA_BRACKET)
    f_lo = excess(lo)
    if f_lo < -CALIBRATION_RTOL * constraints.q_av:
        raise NumericalError(
            f"average constraint Q_av={constraints.q_av} unreachable: E{{gamma_sp P}} at the smallest "
            f"multiplier is only {f_lo + constraints.q_av:.6g}"
        )
    if excess(hi) > 0.0:
        raise NumericalError(f"multiplier bracket too small for Q_av={constraints.q_av}")

    if f_lo <= 0.0:
        # Q_p ~ Q_av: the peak cap alone meets the average constraint
        log_lambda = lo
    else:
        log_lambda = optimize.bisect(excess, lo, hi, xtol=1e-13, maxiter=200)
    policy = policy_for(log_lambda)
    achieved = mean_interference(samples, policy)
    rel_err = abs(achieved - constraints.q_av) / constraints.q_av
    if rel_err > CALIBRATION_RTOL:
        raise NumericalError(f"lambda calibration missed Q_av by {rel_err:.3g} (relative)")

    log_dict(
        logger,
        logging.DEBUG,
        "Lagrange multiplier calibrated",
        {
            "q_av": constraints.q_av,
            "q_p": constraints.q_p,
            "lambda": f"{policy.multiplier:.6g}",
            "achieved": f"{achieved:.6g}",
            "runs": runs,
        },
    )
    return policy
