"""Special functions used by the analytic channel and capacity formulas."""

import logging
import math

import numpy as np
import numpy.typing as npt
from scipy import special

from ..exceptions import DomainError, NumericalError
from ..types import FloatArray

logger = logging.getLogger("underlay_sim.specfun")

EULER_GAMMA = float(np.euler_gamma)

# Series stop: next term below this fraction of the running sum
_SERIES_RTOL = 1e-16
_MAX_SERIES_TERMS = 100_000


def _require_finite(x: float, name: str) -> float:
    value = float(x)
    if not math.isfinite(value):
        raise DomainError(f"{name} requires a finite argument, got {x!r}")
    return value


def bessel_i0(x: float) -> float:
    """Modified Bessel function of the first kind, order 0.

    Args:
        x: Finite real argument

    Returns:
        I0(x)

    Raises:
        DomainError: If x is not finite
    """
    return float(special.i0(_require_finite(x, "bessel_i0")))


def bessel_i1(x: float) -> float:
    """Modified Bessel function of the first kind, order 1.

    Args:
        x: Finite real argument

    Returns:
        I1(x)

    Raises:
        DomainError: If x is not finite
    """
    return float(special.i1(_require_finite(x, "bessel_i1")))


def marcum_q1_array(a: npt.ArrayLike, b: npt.ArrayLike) -> FloatArray:
    """Vectorized first-order Marcum Q function.

    Uses the Neumann series in exponentially scaled Bessel functions. For
    ``b >= a`` the series converges to Q directly; otherwise the
    complementary series is summed and subtracted from one, so every term
    ratio is at most one.

    Args:
        a: Non-centrality arguments (>= 0)
        b: Threshold arguments (>= 0)

    Returns:
        Q1(a, b) broadcast over the inputs, clamped to [0, 1]

    Raises:
        DomainError: If any argument is negative or not finite
        NumericalError: If the series fails to converge
    """
    a_arr, b_arr = np.broadcast_arrays(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64))
    if not (np.all(np.isfinite(a_arr)) and np.all(np.isfinite(b_arr))):
        raise DomainError("marcum_q1 requires finite arguments")
    if np.any(a_arr < 0.0) or np.any(b_arr < 0.0):
        raise DomainError("marcum_q1 requires a >= 0 and b >= 0")

    upper = b_arr >= a_arr
    zero_b = b_arr == 0.0
    x = a_arr * b_arr
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(upper, a_arr / b_arr, b_arr / a_arr)
    ratio = np.where(zero_b, 0.0, ratio)

    total = np.where(upper, special.ive(0, x), 0.0)
    power = np.ones_like(x)
    for k in range(1, _MAX_SERIES_TERMS):
        power = power * ratio
        term = power * special.ive(k, x)
        total = total + term
        if np.all(term <= _SERIES_RTOL * np.maximum(total, 1e-300)):
            logger.debug(f"marcum_q1 series converged after {k} terms")
            break
    else:
        raise NumericalError(f"marcum_q1 series did not converge in {_MAX_SERIES_TERMS} terms")

    prefactor = np.exp(-0.5 * (a_arr - b_arr) ** 2)
    q = np.where(upper, prefactor * total, 1.0 - prefactor * total)
    q = np.where(zero_b, 1.0, q)
    return np.clip(q, 0.0, 1.0)


def marcum_q1(a: float, b: float) -> float:
    """First-order Marcum Q function Q1(a, b).

    Args:
        a: Non-centrality argument (>= 0)
        b: Threshold argument (>= 0)

    Returns:
        Q1(a, b) in [0, 1]

    Raises:
        DomainError: If a or b is negative
    """
    return float(marcum_q1_array(a, b))


def exp_integral_e1(x: float) -> float:
    """Exponential integral E1(x) for x > 0.

    Raises:
        DomainError: If x <= 0 or x is NaN
    """
    value = float(x)
    if not value > 0.0:
        raise DomainError(f"exp_integral_e1 requires x > 0, got {x!r}")
    return float(special.exp1(value))


def laguerre_half(x: float) -> float:
    """Laguerre function of order 1/2 for non-positive arguments.

    Evaluated through ``exp(x/2)[(1-x) I0(-x/2) - x I1(-x/2)]`` with
    exponentially scaled Bessel functions, so large ``|x|`` cannot overflow.

    Args:
        x: Argument (<= 0)

    Returns:
        L_{1/2}(x)

    Raises:
        DomainError: If x > 0 or x is not finite
    """
    value = _require_finite(x, "laguerre_half")
    if value > 0.0:
        raise DomainError(f"laguerre_half is supported for x <= 0 only, got {x!r}")
    y = -0.5 * value
    return float((1.0 - value) * special.i0e(y) - value * special.i1e(y))


def harmonic(n: int) -> float:
    """N-th harmonic number, summed exactly with ``math.fsum``.

    Raises:
        DomainError: If n < 1
    """
    if int(n) != n or n < 1:
        raise DomainError(f"harmonic requires a positive integer, got {n!r}")
    return math.fsum(1.0 / np.arange(1, int(n) + 1, dtype=np.float64))
