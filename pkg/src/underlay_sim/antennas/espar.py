"""ESPAR antenna model: steering vectors, orthonormal basis patterns and the beamspace channel."""

import logging
from functools import lru_cache

import numpy as np
import numpy.typing as npt

from ..core.models import (
    BasisPatternSet,
    BeamspaceChannel,
    BeamspaceMatrix,
    Column,
    EsparGeometry,
    ResultTable,
)
from ..exceptions import DegeneracyError, DimensionError, NumericalError
from ..types import ComplexArray

logger = logging.getLogger("underlay_sim.espar")

# Series resistance of the active port (ohms)
ACTIVE_PORT_RESISTANCE = 50.0

DEGENERACY_RTOL = 1e-10
RANK_RTOL = 1e-10
SINGULAR_CONDITION = 1e12


def steering_vectors(geom: EsparGeometry, thetas: npt.ArrayLike) -> ComplexArray:
    """Steering vectors for many angles, shape ``(M, len(thetas))``."""
    theta = np.atleast_1d(np.asarray(thetas, dtype=np.float64))
    out = np.ones((geom.num_elements, theta.size), dtype=np.complex128)
    b = geom.wavenumber_radius
    for m, theta_m in enumerate(geom.element_angles, start=1):
        out[m] = np.exp(1j * b * np.cos(theta - theta_m))
    return out


def steering_vector(geom: EsparGeometry, theta: float) -> ComplexArray:
    """Steering vector ``a(theta)`` with ``a_0 = 1`` for the active element.

    Args:
        geom: Antenna geometry
        theta: Azimuth angle in radians

    Returns:
        Complex M-vector of unit-modulus entries
    """
    return steering_vectors(geom, [theta])[:, 0]


def gram_schmidt(functions: ComplexArray, weight: float) -> tuple[ComplexArray, ComplexArray]:
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    Args:
        functions: ``(M, G)`` sampled component functions
        weight: Quadrature weight of each grid point

    Returns:
        Orthonormal patterns ``(M, G)`` and coefficients ``C`` with ``patterns = C @ functions``

    Raises:
        DegeneracyError: If a component is numerically dependent on the previous ones
    """
    f = np.asarray(functions, dtype=np.complex128)
    m = f.shape[0]
    patterns = np.zeros_like(f)
    coeffs = np.zeros((m, m), dtype=np.complex128)
    for n in range(m):
        v = f[n].copy()
        c = np.zeros(m, dtype=np.complex128)
        c[n] = 1.0
        for _ in range(2):
            for j in range(n):
                proj = weight * np.vdot(patterns[j], v)
                v -= proj * patterns[j]
                c -= proj * coeffs[j]
        norm = np.sqrt(weight * np.vdot(v, v).real)
        reference = np.sqrt(weight * np.vdot(f[n], f[n]).real)
        if norm <= DEGENERACY_RTOL * reference:
            raise DegeneracyError(f"component function {n} is linearly dependent on the previous ones", index=n)
        patterns[n] = v / norm
        coeffs[n] = c / norm
    return patterns, coeffs


def orthonormal_basis(geom: EsparGeometry, grid_size: int | None = None) -> BasisPatternSet:
    """Orthonormal basis patterns spanning the steering components.

    Inner products use the trapezoid rule on a uniform periodic grid, so the
    discrete Gram matrix is the identity by construction.

    Args:
        geom: Antenna geometry
        grid_size: Number of grid angles (default ``max(64, 8M)``)

    Returns:
        Basis pattern set with ``M`` patterns

    Raises:
        DimensionError: If grid_size < 8M
        DegeneracyError: If the component functions are rank deficient on the grid
    """
    m = geom.num_elements
    size = grid_size if grid_size is not None else max(64, 8 * m)
    if size < 8 * m:
        raise DimensionError(f"grid_size must be >= 8M = {8 * m}, got {size}")

    grid = 2.0 * np.pi * np.arange(size) / size
    weight = 2.0 * np.pi / size
    components = steering_vectors(geom, grid)
    patterns, coeffs = gram_schmidt(components, weight)
    projection = weight * components @ patterns.conj().T

    logger.debug(f"Built {m} basis patterns on a {size}-point grid (d/lambda={geom.radius_wavelengths})")
    return BasisPatternSet(
        geometry=geom,
        grid=grid,
        patterns=patterns,
        projection_matrix=projection,
        coefficients=coeffs,
    )


@lru_cache(maxsize=64)
def cached_basis(num_elements: int, radius_wavelengths: float = 0.25) -> BasisPatternSet:
    """Shared basis set for a geometry; immutable, so safe across threads."""
    return orthonormal_basis(EsparGeometry(num_elements=num_elements, radius_wavelengths=radius_wavelengths))


def gram_matrix(basis: BasisPatternSet) -> ComplexArray:
    """Discrete Gram matrix of the basis patterns."""
    return np.asarray(basis.grid_weight * basis.patterns @ basis.patterns.conj().T, dtype=np.complex128)


def espar_currents(admittance: npt.ArrayLike, reactances: npt.ArrayLike, v_s: complex) -> ComplexArray:
    """Element currents ``v_s (Y^-1 + X)^-1 u`` for given parasitic reactances.

    Args:
        admittance: ``M x M`` mutual admittance matrix
        reactances: ``M - 1`` parasitic reactances (ohms)
        v_s: Source voltage at the active port

    Returns:
        Complex current vector

    Raises:
        DimensionError: If shapes disagree
        NumericalError: If ``Y`` or ``Y^-1 + X`` is singular
    """
    y = np.asarray(admittance, dtype=np.complex128)
    x = np.atleast_1d(np.asarray(reactances, dtype=np.float64))
    if y.ndim != 2 or y.shape[0] != y.shape[1]:
        raise DimensionError(f"admittance must be square, got shape {y.shape}")
    m = y.shape[0]
    if x.size != m - 1:
        raise DimensionError(f"expected {m - 1} reactances, got {x.size}")

    load = np.diag(np.concatenate(([ACTIVE_PORT_RESISTANCE], 1j * x))).astype(np.complex128)
    try:
        cond_y = np.linalg.cond(y)
        if not np.isfinite(cond_y) or cond_y > SINGULAR_CONDITION:
            raise NumericalError(f"admittance matrix is singular (condition number {cond_y:.3g})")
        system = np.linalg.inv(y) + load
        cond = np.linalg.cond(system)
        if not np.isfinite(cond) or cond > SINGULAR_CONDITION:
            raise NumericalError(f"Y^-1 + X is singular (condition number {cond:.3g})")
        u = np.zeros(m, dtype=np.complex128)
        u[0] = 1.0
        return np.asarray(v_s * np.linalg.solve(system, u), dtype=np.complex128)
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"Failed to solve for ESPAR currents: {e}") from e


def pattern_weights(currents: npt.ArrayLike, basis: BasisPatternSet) -> ComplexArray:
    """Basis weights ``w_n = i^T q_n`` of a current vector.

    Raises:
        DimensionError: If the current vector length differs from the basis size
    """
    i = np.asarray(currents, dtype=np.complex128)
    if i.shape != (basis.size,):
        raise DimensionError(f"expected {basis.size} currents, got shape {i.shape}")
    return np.asarray(i @ basis.projection_matrix, dtype=np.complex128)


def pattern_responses(basis: BasisPatternSet, thetas: npt.ArrayLike) -> ComplexArray:
    """Basis pattern values ``Phi_n(theta)``, shape ``(M, len(thetas))``."""
    return np.asarray(basis.coefficients @ steering_vectors(basis.geometry, thetas), dtype=np.complex128)


def radiation_pattern(weights: npt.ArrayLike, basis: BasisPatternSet, theta: float) -> complex:
    """Pattern value ``sum_n w_n Phi_n(theta)``.

    Raises:
        DimensionError: If the weight vector length differs from the basis size
    """
    w = np.asarray(weights, dtype=np.complex128)
    if w.shape != (basis.size,):
        raise DimensionError(f"expected {basis.size} weights, got shape {w.shape}")
    return complex(w @ pattern_responses(basis, [theta])[:, 0])


def beamspace_channel_matrix(channel: BeamspaceChannel) -> BeamspaceMatrix:
    """``H_bs = Phi_R H_b Phi_T^H`` and its numerical rank (the ADoF)."""
    matrix = (channel.phi_r * channel.h_b) @ channel.phi_t.conj().T
    singular = np.linalg.svd(matrix, compute_uv=False)
    if singular.size == 0 or singular[0] == 0.0:
        adof = 0
    else:
        adof = int(np.sum(singular > RANK_RTOL * singular[0]))
    return BeamspaceMatrix(matrix=np.asarray(matrix, dtype=np.complex128), adof=adof)


def export_patterns(basis: BasisPatternSet) -> ResultTable:
    """Pattern samples as a table with columns ``theta_rad, pattern_index, re, im``."""
    table = ResultTable(
        columns=[
            Column(name="theta", unit="rad"),
            Column(name="pattern_index"),
            Column(name="re"),
            Column(name="im"),
        ],
        metadata={
            "num_elements": str(basis.size),
            "radius_wavelengths": str(basis.geometry.radius_wavelengths),
            "grid_size": str(basis.grid.size),
        },
    )
    for n in range(basis.size):
        for theta, value in zip(basis.grid, basis.patterns[n], strict=True):
            table.append([float(theta), n, float(value.real), float(value.imag)])
    return table
