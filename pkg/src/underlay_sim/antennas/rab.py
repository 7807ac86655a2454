"""Random aerial beamforming (RAB) over ESPAR basis patterns.

Weights are redrawn every slot while the LoS beamspace phases stay fixed.
Channels are formed as ``w_R^T H w_T``; with uniform phases this has the
same law as the ``w_R^H`` form. Endpoints at the PU use a unit weight.
"""

import logging
import math

import numpy as np
import numpy.typing as npt

from ..core.models import (
    ChannelSpec,
    LosBeamspaceMatrix,
    NullingProbability,
    RabConfig,
    RabLinks,
    ReceiveMode,
    ScattererSet,
    SystemSpec,
)
from ..exceptions import DimensionError, DomainError
from ..types import ComplexArray, FloatArray, RandomStream
from .espar import cached_basis, pattern_responses

logger = logging.getLogger("underlay_sim.rab")

SQRT_2PI = math.sqrt(2.0 * math.pi)
NULLING_BATCH = 1_000_000


def _los_amplitude(k: float, gbar: float) -> float:
    """``sqrt(K gbar / (K + 1))``."""
    return math.sqrt(k * gbar / (k + 1.0))


# Weights
def phases_to_weights(phases: npt.ArrayLike) -> ComplexArray:
    """Unit-norm weights ``e^{j theta} / sqrt(m)`` along the last axis."""
    theta = np.asarray(phases, dtype=np.float64)
    m = theta.shape[-1]
    return np.asarray(np.exp(1j * theta) / math.sqrt(m), dtype=np.complex128)


def draw_weights(m: int, rng: RandomStream) -> ComplexArray:
    """Random basis weights with i.i.d. uniform phases and unit squared norm.

    Raises:
        DomainError: If m < 1
    """
    if m < 1:
        raise DomainError(f"number of basis patterns must be >= 1, got {m}")
    return phases_to_weights(rng.uniform(0.0, 2.0 * math.pi, size=m))


def smart_receive_vector(los: LosBeamspaceMatrix, w_t: npt.ArrayLike) -> ComplexArray:
    """Superposed LoS responses ``a_m = sqrt(M_T) sum_l e^{j phi^{m,l}} w_{T,l}``."""
    w = np.asarray(w_t, dtype=np.complex128)
    return np.asarray(math.sqrt(los.m_t) * np.einsum("...rt,...t->...r", np.exp(1j * los.phases), w))


def smart_receive_weights(a: npt.ArrayLike) -> FloatArray:
    """Receive phases ``theta_{R,m} = -arg(a_m)`` that co-phase the LoS terms."""
    return np.asarray(-np.angle(np.asarray(a, dtype=np.complex128)), dtype=np.float64)


# LoS and scatterer models
def draw_los_matrix(m_r: int, m_t: int, gbar: float, rng: RandomStream, pairs: int | None = None) -> LosBeamspaceMatrix:
    """Fixed LoS beamspace matrix with uniform phases (one per pair if ``pairs`` is set)."""
    shape = (m_r, m_t) if pairs is None else (pairs, m_r, m_t)
    return LosBeamspaceMatrix(phases=rng.uniform(0.0, 2.0 * math.pi, size=shape), avg_power=gbar)


def draw_rab_links(system: SystemSpec, cfg: RabConfig, rng: RandomStream, pairs: int | None = None) -> RabLinks:
    """LoS matrices of the SU-SU, SU-PU and PU-SU links of one pair (or of ``pairs`` pairs)."""
    return RabLinks(
        su_su=draw_los_matrix(cfg.m_r, cfg.m_t, system.su_su.avg_power, rng, pairs),
        su_pu=draw_los_matrix(1, cfg.m_t, system.su_pu.avg_power, rng, pairs),
        pu_su=draw_los_matrix(cfg.m_r, 1, system.pu_su.avg_power, rng, pairs),
    )


def draw_scatterers(spec: ChannelSpec, cfg: RabConfig, rng: RandomStream) -> ScattererSet:
    """One slot of scatterers: gains ``CN(0, gbar/(K+1))`` and uniform angles.

    Pattern responses are ``sqrt(2 pi) Phi(angle)`` so that a single
    constant pattern has unit response.
    """
    q = cfg.scatterers
    variance = spec.avg_power / (spec.k_factor + 1.0)
    gains = math.sqrt(variance / 2.0) * (rng.standard_normal(q) + 1j * rng.standard_normal(q))
    departure = rng.uniform(0.0, 2.0 * math.pi, size=q)
    arrival = rng.uniform(0.0, 2.0 * math.pi, size=q)
    basis_t = cached_basis(cfg.m_t, cfg.radius_wavelengths)
    basis_r = cached_basis(cfg.m_r, cfg.radius_wavelengths)
    return ScattererSet(
        gains=gains,
        departure_angles=departure,
        arrival_angles=arrival,
        responses_t=SQRT_2PI * pattern_responses(basis_t, departure),
        responses_r=SQRT_2PI * pattern_responses(basis_r, arrival),
    )


# Single-slot channel synthesis
def _check_weights(los: LosBeamspaceMatrix, w_r: ComplexArray, w_t: ComplexArray) -> None:
    if w_r.shape[-1] != los.m_r or w_t.shape[-1] != los.m_t:
        raise DimensionError(
            f"weights ({w_r.shape[-1]}, {w_t.shape[-1]}) do not match LoS matrix ({los.m_r}, {los.m_t})"
        )


def artificial_fading_component(
    cfg: RabConfig,
    spec: ChannelSpec,
    los: LosBeamspaceMatrix,
    w_r: npt.ArrayLike,
    w_t: npt.ArrayLike,
) -> complex:
    """LoS part ``U = sqrt(K/(K+1)) w_R^T Hbar w_T`` of the RAB channel.

    Raises:
        DimensionError: If the weights do not match the configuration
    """
    wr = np.asarray(w_r, dtype=np.complex128)
    wt = np.asarray(w_t, dtype=np.complex128)
    if los.phases.ndim != 2:
        raise DimensionError("single-slot synthesis needs a 2-D LoS matrix")
    if (los.m_r, los.m_t) not in ((cfg.m_r, cfg.m_t), (1, cfg.m_t), (cfg.m_r, 1)):
        raise DimensionError(f"LoS matrix {los.m_r}x{los.m_t} does not fit M_R={cfg.m_r}, M_T={cfg.m_t}")
    _check_weights(los, wr, wt)
    k = spec.k_factor
    return complex(math.sqrt(k / (k + 1.0)) * (wr @ los.entries @ wt))


def scattered_component(scatterers: ScattererSet, w_r: npt.ArrayLike, w_t: npt.ArrayLike) -> complex:
    """Scattered part with per-scatterer pattern gains, normalized to the gain law.

    Raises:
        DimensionError: If the weights do not match the pattern responses
    """
    wr = np.asarray(w_r, dtype=np.complex128)
    wt = np.asarray(w_t, dtype=np.complex128)
    resp_r = np.atleast_2d(scatterers.responses_r)
    resp_t = np.atleast_2d(scatterers.responses_t)
    if resp_r.shape[0] != wr.size or resp_t.shape[0] != wt.size:
        raise DimensionError("weights do not match the scatterer pattern responses")
    r = wr @ resp_r
    t = resp_t.conj().T @ wt
    path = r * t
    energy = float(np.sum(np.abs(path) ** 2))
    if energy == 0.0:
        return 0j
    return complex(np.sum(np.asarray(scatterers.gains) * path) / math.sqrt(energy))


def equivalent_channel(
    cfg: RabConfig,
    spec: ChannelSpec,
    los: LosBeamspaceMatrix,
    scatterers: ScattererSet,
    w_r: npt.ArrayLike,
    w_t: npt.ArrayLike,
) -> complex:
    """Equivalent SISO channel seen through the RAB weights in one slot."""
    return artificial_fading_component(cfg, spec, los, w_r, w_t) + scattered_component(scatterers, w_r, w_t)


# Vectorized slot sampling
def _draw_phases(rng: RandomStream, shape: tuple[int, ...]) -> FloatArray:
    return rng.uniform(0.0, 2.0 * math.pi, size=shape)


def _los_term(los: LosBeamspaceMatrix, k: float, w_r: ComplexArray, w_t: ComplexArray) -> ComplexArray:
    coeff = math.sqrt(k / (k + 1.0) * los.avg_power)
    return np.asarray(coeff * np.einsum("...r,...rt,...t->...", w_r, np.exp(1j * los.phases), w_t))


def _scatter_term(spec: ChannelSpec, rng: RandomStream, shape: tuple[int, ...]) -> ComplexArray:
    std = math.sqrt(spec.avg_power / (2.0 * (spec.k_factor + 1.0)))
    return np.asarray(std * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)))


def _receive_weights(
    los: LosBeamspaceMatrix, w_t: ComplexArray, mode: ReceiveMode, rng: RandomStream, shape: tuple[int, ...]
) -> ComplexArray:
    if mode is ReceiveMode.SMART:
        return phases_to_weights(smart_receive_weights(smart_receive_vector(los, w_t)))
    return phases_to_weights(_draw_phases(rng, (*shape, los.m_r)))


def sample_equivalent_channels(
    spec: ChannelSpec,
    los: LosBeamspaceMatrix,
    size: int,
    rng: RandomStream,
    receive_mode: ReceiveMode = ReceiveMode.RANDOM,
) -> ComplexArray:
    """``size`` slots of one RAB link with fresh weights per slot.

    The scattered component is drawn from its exact law ``CN(0, gbar/(K+1))``
    given the weights. A leading pair axis on ``los`` yields shape
    ``(size, pairs)``.
    """
    batch = (size, *los.phases.shape[:-2])
    w_t = phases_to_weights(_draw_phases(rng, (*batch, los.m_t)))
    w_r = _receive_weights(los, w_t, receive_mode, rng, batch)
    return _los_term(los, spec.k_factor, w_r, w_t) + _scatter_term(spec, rng, batch)


def sample_los_averaged_channels(
    spec: ChannelSpec,
    m_r: int,
    m_t: int,
    size: int,
    rng: RandomStream,
    receive_mode: ReceiveMode = ReceiveMode.RANDOM,
) -> ComplexArray:
    """``size`` slots whose LoS beamspace phases are redrawn along with the weights.

    This is the law of a link averaged over LoS geometries: the artificial
    fading term is a sum of ``M_T M_R`` i.i.d. phasors, so the envelope
    approaches Rayleigh already at a handful of patterns.
    """
    los = draw_los_matrix(m_r, m_t, spec.avg_power, rng, pairs=size)
    w_t = phases_to_weights(_draw_phases(rng, (size, m_t)))
    w_r = _receive_weights(los, w_t, receive_mode, rng, (size,))
    return _los_term(los, spec.k_factor, w_r, w_t) + _scatter_term(spec, rng, (size,))


def sample_artificial_fading(
    spec: ChannelSpec,
    los: LosBeamspaceMatrix,
    size: int,
    rng: RandomStream,
    receive_mode: ReceiveMode = ReceiveMode.RANDOM,
) -> ComplexArray:
    """``size`` slots of the artificial fading component alone."""
    batch = (size, *los.phases.shape[:-2])
    w_t = phases_to_weights(_draw_phases(rng, (*batch, los.m_t)))
    w_r = _receive_weights(los, w_t, receive_mode, rng, batch)
    return _los_term(los, spec.k_factor, w_r, w_t)


def sample_rab_triples(
    system: SystemSpec,
    cfg: RabConfig,
    size: int,
    rng: RandomStream,
    links: RabLinks,
) -> tuple[FloatArray, FloatArray, FloatArray]:
    """Channel powers ``(gamma_s, gamma_sp, gamma_ps)`` with RAB at every SU endpoint.

    ``w_T`` is shared by SU-SU and SU-PU, ``w_R`` by SU-SU and PU-SU. In
    smart mode ``w_R`` is matched to the SU-SU LoS matrix only.
    """
    batch = (size, *links.su_su.phases.shape[:-2])
    w_t = phases_to_weights(_draw_phases(rng, (*batch, cfg.m_t)))
    w_r = _receive_weights(links.su_su, w_t, cfg.receive_mode, rng, batch)
    unit = np.ones((*batch, 1), dtype=np.complex128)

    h_s = _los_term(links.su_su, system.su_su.k_factor, w_r, w_t) + _scatter_term(system.su_su, rng, batch)
    h_sp = _los_term(links.su_pu, system.su_pu.k_factor, unit, w_t) + _scatter_term(system.su_pu, rng, batch)
    h_ps = _los_term(links.pu_su, system.pu_su.k_factor, w_r, unit) + _scatter_term(system.pu_su, rng, batch)
    return np.abs(h_s) ** 2, np.abs(h_sp) ** 2, np.abs(h_ps) ** 2


# Two-phasor law and opportunistic nulling
def artificial_fading_cdf(r: npt.ArrayLike, k_factor: float, gbar: float) -> FloatArray:
    """CDF of ``|U|`` for two unit phasors (``M_T M_R = 2``), an arcsine law.

    ``|U|^2 = A (1 + cos D)`` with ``A = K gbar / (K + 1)`` and ``D`` uniform.
    """
    amplitude = k_factor * gbar / (k_factor + 1.0)
    radius = np.asarray(r, dtype=np.float64)
    t = np.clip(radius * radius / amplitude, 0.0, 2.0)
    cdf = 0.5 + np.arcsin(t - 1.0) / np.pi
    return np.asarray(np.where(radius <= 0.0, 0.0, cdf), dtype=np.float64)


def _nulling_closed(m_t: int | None, k_factor: float, gbar: float, delta: float) -> float | None:
    t = delta * delta * (k_factor + 1.0) / (k_factor * gbar)
    if m_t is None:
        return float(-np.expm1(-t))
    if m_t == 1:
        return 1.0 if t > 1.0 else 0.0
    if m_t == 2:
        return float(artificial_fading_cdf(delta, k_factor, gbar))
    return None


def nulling_probability(
    m_t: int | None,
    k_factor: float,
    gbar: float,
    delta: float,
    rng: RandomStream,
    draws: int = 10_000_000,
) -> NullingProbability:
    """Probability that the SU-PU artificial fading magnitude drops below ``delta``.

    ``m_t=None`` is the many-pattern (Rayleigh) limit. Closed forms exist for
    ``m_t`` in {1, 2, None}; a Monte Carlo estimate is always returned.

    Args:
        m_t: Transmit basis patterns, or None for the limit
        k_factor: K-factor of the SU-PU link (> 0)
        gbar: Average SU-PU power
        delta: Magnitude threshold (> 0)
        rng: Exclusive random stream
        draws: Monte Carlo draws

    Returns:
        Closed form (or None) and Monte Carlo estimate with its standard error

    Raises:
        DomainError: If delta <= 0, k_factor <= 0 or m_t < 1
    """
    if not delta > 0.0:
        raise DomainError(f"delta must be positive, got {delta}")
    if not k_factor > 0.0:
        raise DomainError(f"nulling needs a LoS component (k_factor > 0), got {k_factor}")
    if m_t is not None and m_t < 1:
        raise DomainError(f"m_t must be >= 1, got {m_t}")

    amplitude = _los_amplitude(k_factor, gbar)
    hits = 0
    remaining = draws
    while remaining > 0:
        batch = min(NULLING_BATCH, remaining)
        if m_t is None:
            std = amplitude / math.sqrt(2.0)
            u = std * (rng.standard_normal(batch) + 1j * rng.standard_normal(batch))
        else:
            phases = rng.uniform(0.0, 2.0 * math.pi, size=(batch, m_t))
            u = amplitude / math.sqrt(m_t) * np.exp(1j * phases).sum(axis=1)
        hits += int(np.count_nonzero(np.abs(u) < delta))
        remaining -= batch

    p = hits / draws if draws else 0.0
    std_err = math.sqrt(p * (1.0 - p) / draws) if draws else 0.0
    closed = _nulling_closed(m_t, k_factor, gbar, delta)
    logger.debug(f"Nulling probability m_t={m_t} delta={delta}: closed={closed} mc={p:.6g}")
    return NullingProbability(epsilon_closed=closed, epsilon_mc=p, std_err=std_err, draws=draws)

