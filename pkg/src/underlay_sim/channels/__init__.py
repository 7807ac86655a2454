"""Fading channel models."""

from .fading import (
    AWGN_K_FACTOR,
    exponential_ratio_pdf_z,
    inverse_exponential_pdf_z,
    ratio_pdf_z,
    rician_envelope_variance,
    rician_power_cdf,
    rician_power_pdf,
    sample_rician,
    sample_triples,
    scenario_system,
)

__all__ = [
    "AWGN_K_FACTOR",
    "exponential_ratio_pdf_z",
    "inverse_exponential_pdf_z",
    "ratio_pdf_z",
    "rician_envelope_variance",
    "rician_power_cdf",
    "rician_power_pdf",
    "sample_rician",
    "sample_triples",
    "scenario_system",
]
