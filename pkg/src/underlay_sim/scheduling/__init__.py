"""Multiuser scheduling on the parallel access channel."""

from .multiuser import (
    capacity_scaling_experiment,
    extreme_min_scale,
    md_gain_reference,
    pac_gain,
    schedule,
    schedule_array,
    scaling_capacities,
    theorem2_bound,
    theorem3_bound,
)

__all__ = [
    "capacity_scaling_experiment",
    "extreme_min_scale",
    "md_gain_reference",
    "pac_gain",
    "scaling_capacities",
    "schedule",
    "schedule_array",
    "theorem2_bound",
    "theorem3_bound",
]
