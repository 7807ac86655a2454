"""ESPAR antennas and random aerial beamforming."""

from .espar import (
    beamspace_channel_matrix,
    espar_currents,
    export_patterns,
    orthonormal_basis,
    pattern_weights,
    radiation_pattern,
    steering_vector,
)
from .rab import (
    artificial_fading_component,
    draw_los_matrix,
    draw_rab_links,
    draw_scatterers,
    draw_weights,
    equivalent_channel,
    nulling_probability,
    sample_equivalent_channels,
    sample_los_averaged_channels,
    sample_rab_triples,
    smart_receive_weights,
)

__all__ = [
    "artificial_fading_component",
    "beamspace_channel_matrix",
    "draw_los_matrix",
    "draw_rab_links",
    "draw_scatterers",
    "draw_weights",
    "equivalent_channel",
    "espar_currents",
    "export_patterns",
    "nulling_probability",
    "orthonormal_basis",
    "pattern_weights",
    "radiation_pattern",
    "sample_equivalent_channels",
    "sample_los_averaged_channels",
    "sample_rab_triples",
    "smart_receive_weights",
    "steering_vector",
]
