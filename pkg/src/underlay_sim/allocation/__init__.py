"""Power allocation and ergodic capacity."""

from .capacity import (
    PointMass,
    awgn_capacity,
    awgn_lagrange_multiplier,
    capacity_semianalytic,
    capacity_sweep,
    ergodic_capacity_mc,
    estimate_capacity,
    lemma1_asymptotics,
)
from .power import allocate_power, allocate_power_array, mean_interference, region_boundaries, solve_lambda

__all__ = [
    "PointMass",
    "allocate_power",
    "allocate_power_array",
    "awgn_capacity",
    "awgn_lagrange_multiplier",
    "capacity_semianalytic",
    "capacity_sweep",
    "ergodic_capacity_mc",
    "estimate_capacity",
    "lemma1_asymptotics",
    "mean_interference",
    "region_boundaries",
    "solve_lambda",
]
