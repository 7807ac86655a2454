"""Numerical building blocks: special functions, random streams and estimators."""

from .rng import substream
from .specfun import (
    EULER_GAMMA,
    bessel_i0,
    bessel_i1,
    exp_integral_e1,
    harmonic,
    laguerre_half,
    marcum_q1,
    marcum_q1_array,
)
from .stats import MomentSummary, ks_statistic, pool_estimates, rayleigh_ks, summarize

__all__ = [
    "EULER_GAMMA",
    "MomentSummary",
    "bessel_i0",
    "bessel_i1",
    "exp_integral_e1",
    "harmonic",
    "ks_statistic",
    "laguerre_half",
    "marcum_q1",
    "marcum_q1_array",
    "pool_estimates",
    "rayleigh_ks",
    "substream",
    "summarize",
]
