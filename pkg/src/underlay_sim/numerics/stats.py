"""Estimator pooling and goodness-of-fit helpers."""

import math
from collections.abc import Callable, Sequence

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field
from scipy import stats

from ..exceptions import DomainError


class MomentSummary(BaseModel):
    """Count, mean and centered second moment of a sample."""

    model_config = ConfigDict(frozen=True)

    count: int = Field(..., ge=0)
    mean: float = 0.0
    m2: float = Field(default=0.0, ge=0.0)

    @property
    def variance(self) -> float:
        """Unbiased sample variance."""
        if self.count < 2:
            return 0.0
        return self.m2 / (self.count - 1)

    @property
    def std_err(self) -> float:
        """Standard error of the mean."""
        if self.count < 2:
            return 0.0
        return math.sqrt(self.variance / self.count)


def summarize(values: npt.ArrayLike) -> MomentSummary:
    """Moment summary of a one-dimensional sample."""
    arr = np.asarray(values, dtype=np.float64).ravel()
    if arr.size == 0:
        return MomentSummary(count=0)
    mean = float(arr.mean())
    m2 = float(np.sum((arr - mean) ** 2))
    return MomentSummary(count=int(arr.size), mean=mean, m2=m2)


def pool_estimates(parts: Sequence[MomentSummary]) -> MomentSummary:
    """Combine partial summaries exactly, in the order given.

    Uses the pairwise update of Chan et al.; the fixed order keeps the
    floating-point result independent of how the parts were computed.
    """
    count = 0
    mean = 0.0
    m2 = 0.0
    for part in parts:
        if part.count == 0:
            continue
        total = count + part.count
        delta = part.mean - mean
        mean += delta * part.count / total
        m2 += part.m2 + delta * delta * count * part.count / total
        count = total
    return MomentSummary(count=count, mean=mean, m2=max(m2, 0.0))


def ks_statistic(samples: npt.ArrayLike, cdf: Callable[[npt.NDArray[np.float64]], npt.ArrayLike]) -> float:
    """One-sample Kolmogorov-Smirnov distance to a reference CDF.

    Args:
        samples: Observed values
        cdf: Vectorized reference CDF

    Returns:
        Supremum distance between the empirical and reference CDFs

    Raises:
        DomainError: If the sample is empty
    """
    arr = np.asarray(samples, dtype=np.float64).ravel()
    if arr.size == 0:
        raise DomainError("ks_statistic needs at least one sample")
    result = stats.kstest(arr, cdf)
    return float(result.statistic)


def rayleigh_ks(magnitudes: npt.ArrayLike, avg_power: float) -> float:
    """KS distance of envelope samples to a Rayleigh law with ``E|h|^2 = avg_power``."""
    if avg_power <= 0.0:
        raise DomainError(f"avg_power must be positive, got {avg_power}")
    scale = math.sqrt(avg_power / 2.0)
    return ks_statistic(magnitudes, stats.rayleigh(scale=scale).cdf)
