"""Rician/Rayleigh fading models and the closed-form distributions built on them."""

import logging
import math

import numpy as np
import numpy.typing as npt
from scipy import special

from ..core.models import ChannelSpec, Scenario, SystemSpec, VarianceEstimate
from ..exceptions import DomainError
from ..numerics.specfun import laguerre_half, marcum_q1_array
from ..types import ComplexArray, FloatArray, RandomStream

logger = logging.getLogger("underlay_sim.channels")

# Numerical stand-in for K -> infinity
AWGN_K_FACTOR = 1e12

VARIANCE_AGREEMENT_RTOL = 0.05


def _non_negative(values: npt.ArrayLike, name: str) -> FloatArray:
    arr = np.asarray(values, dtype=np.float64)
    if np.any(np.isnan(arr)) or np.any(arr < 0.0):
        raise DomainError(f"{name} must be >= 0")
    return arr


# Sampling
def sample_rician(spec: ChannelSpec, rng: RandomStream, size: int | None = None) -> ComplexArray:
    """Draw complex Rician gains ``sqrt(g)(sqrt(K/(K+1)) e^{j phi} + v)``.

    Args:
        spec: Link description
        rng: Exclusive random stream
        size: Number of draws (None for a 0-d array)

    Returns:
        Complex gains with ``E|h|^2 = spec.avg_power``
    """
    k = spec.k_factor
    shape = () if size is None else (size,)
    los = math.sqrt(k / (k + 1.0)) * np.exp(1j * spec.los_phase)
    diffuse_std = math.sqrt(1.0 / (2.0 * (k + 1.0)))
    v = diffuse_std * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    return np.asarray(math.sqrt(spec.avg_power) * (los + v), dtype=np.complex128)


def sample_triples(system: SystemSpec, size: int, rng: RandomStream) -> tuple[FloatArray, FloatArray, FloatArray]:
    """Joint draw of ``size`` channel-power triples ``(gamma_s, gamma_sp, gamma_ps)``."""
    gamma_s = np.abs(sample_rician(system.su_su, rng, size)) ** 2
    gamma_sp = np.abs(sample_rician(system.su_pu, rng, size)) ** 2
    gamma_ps = np.abs(sample_rician(system.pu_su, rng, size)) ** 2
    return gamma_s, gamma_sp, gamma_ps


def scenario_system(
    scenario: Scenario,
    k_factor: float,
    gbar_s: float = 1.0,
    gbar_sp: float = 1.0,
    gbar_ps: float = 1.0,
    gbar_p: float = 10.0,
) -> SystemSpec:
    """Build the system of one fading scenario.

    In an ``X-Y`` scenario both interference links (SU-PU and PU-SU) fade
    like X and the SU-SU link fades like Y. Rician links use ``k_factor``.

    Args:
        scenario: Scenario label
        k_factor: Linear K-factor of the Rician links
        gbar_s: Average SU-SU SNR
        gbar_sp: Average SU-PU channel power
        gbar_ps: Average PU-SU channel power
        gbar_p: PU transmit SNR

    Returns:
        System specification
    """
    if scenario is Scenario.AWGN:
        k_interference = k_su = AWGN_K_FACTOR
    else:
        interference, su = scenario.value.split("-")
        k_interference = k_factor if interference == "rician" else 0.0
        k_su = k_factor if su == "rician" else 0.0
    return SystemSpec(
        su_su=ChannelSpec(k_factor=k_su, avg_power=gbar_s),
        su_pu=ChannelSpec(k_factor=k_interference, avg_power=gbar_sp),
        pu_su=ChannelSpec(k_factor=k_interference, avg_power=gbar_ps),
        pu_tx_power=gbar_p,
    )


# Channel power distribution
def rician_power_pdf_array(gamma: npt.ArrayLike, spec: ChannelSpec) -> FloatArray:
    """Vectorized Rician power pdf (scaled Bessel form, overflow free)."""
    g = _non_negative(gamma, "gamma")
    k = spec.k_factor
    scale = (1.0 + k) / spec.avg_power
    y = 2.0 * np.sqrt(k * scale * g)
    return np.asarray(scale * np.exp(-k - scale * g + y) * special.i0e(y), dtype=np.float64)


def rician_power_pdf(gamma: float, spec: ChannelSpec) -> float:
    """Pdf of the instantaneous power of a Rician channel.

    Args:
        gamma: Channel power (>= 0)
        spec: Link description

    Returns:
        Density value

    Raises:
        DomainError: If gamma is negative
    """
    return float(rician_power_pdf_array(gamma, spec))


def rician_power_cdf_array(gamma: npt.ArrayLike, spec: ChannelSpec) -> FloatArray:
    """Vectorized Rician power CDF through the Marcum Q function."""
    g = _non_negative(gamma, "gamma")
    k = spec.k_factor
    a = math.sqrt(2.0 * k)
    b = np.sqrt(2.0 * (k + 1.0) * g / spec.avg_power)
    return np.clip(1.0 - marcum_q1_array(a, b), 0.0, 1.0)


def rician_power_cdf(gamma: float, spec: ChannelSpec) -> float:
    """CDF ``1 - Q1(sqrt(2K), sqrt(2(K+1) gamma / gbar))`` of the Rician power.

    Raises:
        DomainError: If gamma is negative
    """
    return float(rician_power_cdf_array(gamma, spec))


# Ratio z = gamma_s / gamma_sp
def ratio_pdf_z(z: float, k_sp: float, gbar_s: float, gbar_sp: float) -> float:
    """Pdf of ``z = gamma_s / gamma_sp`` for a Rayleigh SU-SU and a Rician SU-PU link.

    With ``k_sp = 0`` this is the log-logistic law. The exponent is written
    as ``-K r z / ((1 + K) + r z)`` so very large ``k_sp`` stays finite.

    Args:
        z: Ratio value (>= 0)
        k_sp: K-factor of the SU-PU link
        gbar_s: Average SU-SU power
        gbar_sp: Average SU-PU power

    Returns:
        Density value

    Raises:
        DomainError: If z or k_sp is negative
    """
    if z < 0.0 or math.isnan(z):
        raise DomainError(f"ratio_pdf_z requires z >= 0, got {z!r}")
    if k_sp < 0.0:
        raise DomainError(f"ratio_pdf_z requires k_sp >= 0, got {k_sp!r}")
    r = gbar_sp / gbar_s
    k1 = 1.0 + k_sp
    rz = r * z
    denom = k1 + rz
    exponent = -k_sp * rz / denom
    return float(k1 * r * math.exp(exponent) * (k1 * k1 + rz) / denom**3)


def inverse_exponential_pdf_z(z: float, gbar_s: float, gbar_sp: float) -> float:
    """Pdf of z when gamma_s is deterministic and gamma_sp exponential (reciprocal-exponential law).

    Raises:
        DomainError: If z <= 0
    """
    if not z > 0.0:
        raise DomainError(f"inverse_exponential_pdf_z requires z > 0, got {z!r}")
    c = gbar_s / gbar_sp
    return float(c / (z * z) * math.exp(-c / z))


def exponential_ratio_pdf_z(z: float, gbar_s: float, gbar_sp: float) -> float:
    """Pdf of z when gamma_s is exponential and gamma_sp deterministic.

    Raises:
        DomainError: If z < 0
    """
    if z < 0.0 or math.isnan(z):
        raise DomainError(f"exponential_ratio_pdf_z requires z >= 0, got {z!r}")
    rate = gbar_sp / gbar_s
    return float(rate * math.exp(-rate * z))


# Envelope variance
def rician_envelope_variance_closed(spec: ChannelSpec) -> float:
    """Envelope variance of a Rician link, evaluated with the Laguerre-half form as printed."""
    k = spec.k_factor
    g = spec.avg_power
    lag = laguerre_half(-k / (2.0 * g))
    value = 2.0 * g / (k + 1.0) + k / (k + 1.0) - math.pi * g / (2.0 * (k + 1.0)) * lag * lag
    return max(value, 0.0)


def rician_envelope_variance(spec: ChannelSpec, rng: RandomStream, runs: int = 1_000_000) -> VarianceEstimate:
    """Closed-form envelope variance next to a Monte Carlo estimate of ``Var|h|``.

    The closed form mixes units, so the two only agree for some
    parameters; ``agrees`` flags a relative gap of at most 5%.

    Args:
        spec: Link description
        rng: Exclusive random stream
        runs: Monte Carlo draws

    Returns:
        Both estimates and the agreement flag
    """
    closed = rician_envelope_variance_closed(spec)
    envelope = np.abs(sample_rician(spec, rng, runs))
    mc = float(np.var(envelope, ddof=1))
    gap = abs(closed - mc) / mc if mc > 0.0 else math.inf
    agrees = gap <= VARIANCE_AGREEMENT_RTOL
    if not agrees:
        logger.debug(f"Envelope variance mismatch at K={spec.k_factor}: closed={closed:.6g} mc={mc:.6g}")
    return VarianceEstimate(closed_form=closed, monte_carlo=mc, relative_gap=gap, agrees=agrees)
