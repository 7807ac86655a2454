"""Pydantic data models for type safety and validation."""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..exceptions import DimensionError, DomainError
from ..types import ComplexArray, FloatArray

DEFAULT_Q_AV_GRID_DB = [float(v) for v in range(-10, 21, 2)]
DEFAULT_N_LIST = [2**k for k in range(10)]


def db_to_linear(value: float) -> float:
    """Convert a power ratio in dB to linear units."""
    return float(10.0 ** (value / 10.0))


def linear_to_db(value: float) -> float:
    """Convert a linear power ratio to dB (``-inf`` for zero)."""
    if value <= 0.0:
        return -math.inf
    return 10.0 * math.log10(value)


# Enums for type safety
class Scenario(str, Enum):
    """Fading scenario ``X-Y``: interference links are X, the SU-to-SU link is Y."""

    RICIAN_RICIAN = "rician-rician"
    RICIAN_RAYLEIGH = "rician-rayleigh"
    RAYLEIGH_RAYLEIGH = "rayleigh-rayleigh"
    RAYLEIGH_RICIAN = "rayleigh-rician"
    AWGN = "awgn"


class ReceiveMode(str, Enum):
    """How the SU receiver weights its basis patterns."""

    RANDOM = "random"
    SMART = "smart"


# Channel models
class ChannelSpec(BaseModel):
    """Rician link description; ``k_factor = 0`` is Rayleigh."""

    model_config = ConfigDict(frozen=True)

    k_factor: float = Field(default=0.0, ge=0.0, description="Linear K-factor")
    avg_power: float = Field(default=1.0, gt=0.0, description="Average channel power")
    los_phase: float = Field(default=0.0, description="LoS phase in radians")


class ChannelTriple(BaseModel):
    """One joint realization of the SU-SU, SU-PU and PU-SU channel powers."""

    model_config = ConfigDict(frozen=True)

    gamma_s: float = Field(..., ge=0.0)
    gamma_sp: float = Field(..., ge=0.0)
    gamma_ps: float = Field(..., ge=0.0)


class SystemSpec(BaseModel):
    """The three links of one SU pair plus the PU transmit SNR."""

    model_config = ConfigDict(frozen=True)

    su_su: ChannelSpec
    su_pu: ChannelSpec
    pu_su: ChannelSpec
    pu_tx_power: float = Field(default=10.0, gt=0.0)


# Power allocation
class InterferenceConstraints(BaseModel):
    """Average and peak interference caps at the PU receiver."""

    model_config = ConfigDict(frozen=True)

    q_av: float = Field(..., gt=0.0)
    q_p: float = Field(default=math.inf, gt=0.0)

    @model_validator(mode="after")
    def check_peak_above_average(self) -> "InterferenceConstraints":
        if self.q_p < self.q_av:
            raise ValueError(f"q_p ({self.q_p}) must not be below q_av ({self.q_av})")
        return self

    @property
    def rho(self) -> float:
        return self.q_p / self.q_av

    @classmethod
    def from_ratio(cls, q_av: float, rho: float) -> "InterferenceConstraints":
        """Build constraints from ``q_av`` and ``rho = q_p / q_av``."""
        return cls(q_av=q_av, q_p=q_av * rho)


class PowerPolicy(BaseModel):
    """Calibrated water-filling policy."""

    model_config = ConfigDict(frozen=True)

    multiplier: float = Field(..., gt=0.0, description="Lagrange multiplier")
    constraints: InterferenceConstraints
    pu_tx_power: float = Field(..., gt=0.0)
    max_tx_power: float = Field(default=1e12, gt=0.0)

    @field_validator("multiplier")
    @classmethod
    def finite_multiplier(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("Lagrange multiplier must be finite")
        return v

    @property
    def water_level(self) -> float:
        """``1 / (lambda ln 2)``."""
        return 1.0 / (self.multiplier * math.log(2.0))


class CapacityEstimate(BaseModel):
    """Monte Carlo capacity with its standard error and constraint diagnostics."""

    capacity: float
    std_err: float = Field(..., ge=0.0)
    runs: int = Field(..., ge=1)
    mean_interference: float = Field(default=0.0, ge=0.0)
    peak_interference: float = Field(default=0.0, ge=0.0)


class CapacityPoint(BaseModel):
    """One point of a capacity sweep."""

    q_av: float = Field(..., gt=0.0)
    rho: float = Field(..., ge=1.0)
    multiplier: float = Field(..., gt=0.0)
    estimate: CapacityEstimate


class Lemma1Bounds(BaseModel):
    """Rician-Rayleigh capacity with its high- and low-SNR approximations."""

    s: float = Field(..., gt=0.0)
    s_awgn: float = Field(..., gt=0.0)
    exact: float
    awgn_capacity: float
    high_snr_bound: float
    low_snr_bound: float


class VarianceEstimate(BaseModel):
    """Envelope variance in closed form next to its Monte Carlo estimate."""

    closed_form: float
    monte_carlo: float
    relative_gap: float
    agrees: bool


# Random aerial beamforming
class RabConfig(BaseModel):
    """Random aerial beamforming setup for one SU pair."""

    model_config = ConfigDict(frozen=True)

    m_t: int = Field(default=2, ge=1, description="Transmit basis patterns")
    m_r: int = Field(default=2, ge=1, description="Receive basis patterns")
    receive_mode: ReceiveMode = ReceiveMode.RANDOM
    scatterers: int = Field(default=20, ge=1)
    radius_wavelengths: float = Field(default=0.25, gt=0.0)


class NullingProbability(BaseModel):
    """Probability that the artificial fading magnitude falls below ``delta``."""

    epsilon_closed: float | None = None
    epsilon_mc: float = Field(..., ge=0.0, le=1.0)
    std_err: float = Field(..., ge=0.0)
    draws: int = Field(..., ge=0)


# Multiuser
class ScheduleDecision(BaseModel):
    """Pair selected in one slot."""

    index: int = Field(..., ge=0)
    sinr: float = Field(..., ge=0.0)


class PacNetwork(BaseModel):
    """N i.i.d. SU pairs under a peak-only interference constraint."""

    model_config = ConfigDict(frozen=True)

    n_pairs: int = Field(..., ge=1)
    system: SystemSpec
    q_p: float = Field(default=1.0, gt=0.0)
    rab: RabConfig | None = None


# Harness
class Column(BaseModel):
    """CSV column with its unit suffix."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(..., min_length=1)
    unit: str | None = None

    @property
    def header(self) -> str:
        return f"{self.name}_{self.unit}" if self.unit else self.name


Cell = float | int | str


class ResultTable(BaseModel):
    """Experiment output: ordered schema, rows, and metadata."""

    columns: list[Column]
    rows: list[list[Cell]] = Field(default_factory=list)
    metadata: dict[str, str] = Field(default_factory=dict)

    @model_validator(mode="after")
    def check_arity(self) -> "ResultTable":
        width = len(self.columns)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"row {i} has {len(row)} cells, schema has {width}")
        return self

    @property
    def headers(self) -> list[str]:
        return [c.header for c in self.columns]

    def append(self, row: list[Cell]) -> None:
        """Append a row, enforcing the schema arity."""
        if len(row) != len(self.columns):
            raise ValueError(f"row has {len(row)} cells, schema has {len(self.columns)}")
        self.rows.append(row)

    def column(self, name: str) -> list[Cell]:
        """Values of the column whose name (without unit) is ``name``."""
        idx = [c.name for c in self.columns].index(name)
        return [row[idx] for row in self.rows]


class ExperimentConfig(BaseModel):
    """Declarative experiment description; dB keys are converted on load."""

    model_config = ConfigDict(extra="forbid")

    experiment_id: str = Field(..., min_length=1)
    seed: int = Field(default=20240101, ge=0, lt=2**64)
    runs: int = Field(default=100_000, ge=1_000)
    output_path: str | None = None

    # Channel parameters (linear)
    k_factor: float = Field(default=10.0, ge=0.0)
    gbar_s: float = Field(default=1.0, gt=0.0)
    gbar_sp: float = Field(default=1.0, gt=0.0)
    gbar_ps: float = Field(default=1.0, gt=0.0)
    gbar_p: float = Field(default=10.0, gt=0.0)

    # Constraint sweep
    q_av: list[float] = Field(default_factory=lambda: [db_to_linear(v) for v in DEFAULT_Q_AV_GRID_DB])
    rho: list[float] = Field(default_factory=lambda: [math.inf, 1.2])
    q_p: float = Field(default=1.0, gt=0.0)

    # Scenario and antenna parameters
    scenarios: list[Scenario] = Field(default_factory=list)
    n_list: list[int] = Field(default_factory=lambda: list(DEFAULT_N_LIST))
    m_t: int = Field(default=2, ge=1)
    m_r: int = Field(default=2, ge=1)
    basis_counts: list[int] = Field(default_factory=list)
    gbar_s_sweep: list[float] = Field(default_factory=list)
    samples: int | None = Field(default=None, ge=1)

    @model_validator(mode="before")
    @classmethod
    def convert_db_fields(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        converted: dict[str, Any] = {}
        for key, value in data.items():
            if key.endswith("_db"):
                target = key[: -len("_db")]
                if target in data:
                    raise ValueError(f"both {key} and {target} given")
                if isinstance(value, list):
                    converted[target] = [db_to_linear(float(v)) for v in value]
                else:
                    converted[target] = db_to_linear(float(value))
            else:
                converted[key] = value
        if "rho" in converted:
            converted["rho"] = [
                math.inf if isinstance(v, str) and v.strip().lower() == "inf" else v
                for v in converted["rho"]
            ]
        return converted

    @field_validator("q_av")
    @classmethod
    def positive_q_av(cls, v: list[float]) -> list[float]:
        if not v or any(q <= 0.0 for q in v):
            raise ValueError("q_av values must be positive")
        return v

    @field_validator("rho")
    @classmethod
    def peak_not_below_average(cls, v: list[float]) -> list[float]:
        if any(r < 1.0 for r in v):
            raise ValueError("rho = q_p / q_av must be >= 1 (peak cap below average cap)")
        return v

    @field_validator("n_list")
    @classmethod
    def ascending_n(cls, v: list[int]) -> list[int]:
        if any(n < 1 for n in v) or sorted(v) != v or len(set(v)) != len(v):
            raise ValueError("n_list must be strictly ascending positive integers")
        return v

    @field_validator("basis_counts")
    @classmethod
    def positive_counts(cls, v: list[int]) -> list[int]:
        if any(m < 1 for m in v):
            raise ValueError("basis_counts must be >= 1")
        return v

    @property
    def sample_count(self) -> int:
        return self.samples or self.runs


# Array-valued models (numpy payloads, validated in __post_init__)
class EsparGeometry(BaseModel):
    """Circular ESPAR: one active element plus ``num_elements - 1`` parasitics."""

    model_config = ConfigDict(frozen=True)

    num_elements: int = Field(..., ge=1)
    radius_wavelengths: float = Field(default=0.25, gt=0.0)

    @property
    def wavenumber_radius(self) -> float:
        """``b = 2 pi d / lambda``."""
        return 2.0 * math.pi * self.radius_wavelengths

    @property
    def element_angles(self) -> list[float]:
        """Angular positions of the parasitic elements."""
        m = self.num_elements
        if m == 1:
            return []
        return [2.0 * math.pi * i / (m - 1) for i in range(m - 1)]


def _readonly(array: npt.ArrayLike, dtype: type) -> npt.NDArray[Any]:
    out = np.array(array, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class BasisPatternSet:
    """Orthonormal basis patterns sampled on a uniform angular grid.

    ``coefficients`` expresses each pattern in the steering components
    (``Phi = coefficients @ a(theta)``), so patterns can be evaluated off
    the grid. ``projection_matrix[m, n]`` is the projection of component
    ``m`` on pattern ``n``.
    """

    geometry: EsparGeometry
    grid: FloatArray
    patterns: ComplexArray
    projection_matrix: ComplexArray
    coefficients: ComplexArray

    def __post_init__(self) -> None:
        m = self.geometry.num_elements
        object.__setattr__(self, "grid", _readonly(self.grid, np.float64))
        object.__setattr__(self, "patterns", _readonly(self.patterns, np.complex128))
        object.__setattr__(self, "projection_matrix", _readonly(self.projection_matrix, np.complex128))
        object.__setattr__(self, "coefficients", _readonly(self.coefficients, np.complex128))
        if self.patterns.shape != (m, self.grid.size):
            raise DimensionError(f"patterns must be {m} x {self.grid.size}, got {self.patterns.shape}")
        if self.projection_matrix.shape != (m, m) or self.coefficients.shape != (m, m):
            raise DimensionError("projection and coefficient matrices must be square of size M")

    @property
    def size(self) -> int:
        return self.geometry.num_elements

    @property
    def grid_weight(self) -> float:
        """Trapezoid weight of the periodic uniform grid."""
        return 2.0 * math.pi / self.grid.size


@dataclass(frozen=True)
class BeamspaceChannel:
    """Pattern responses toward Q scatterers and the scatterer gains."""

    phi_r: ComplexArray
    phi_t: ComplexArray
    h_b: ComplexArray

    def __post_init__(self) -> None:
        phi_r = np.atleast_2d(np.asarray(self.phi_r, dtype=np.complex128))
        phi_t = np.atleast_2d(np.asarray(self.phi_t, dtype=np.complex128))
        h_b = np.atleast_1d(np.asarray(self.h_b, dtype=np.complex128))
        if h_b.ndim != 1 or phi_r.shape[1] != h_b.size or phi_t.shape[1] != h_b.size:
            raise DimensionError(
                f"inconsistent beamspace dimensions: phi_r {phi_r.shape}, phi_t {phi_t.shape}, h_b {h_b.shape}"
            )
        object.__setattr__(self, "phi_r", phi_r)
        object.__setattr__(self, "phi_t", phi_t)
        object.__setattr__(self, "h_b", h_b)

    @property
    def scatterers(self) -> int:
        return int(self.h_b.size)


@dataclass(frozen=True)
class BeamspaceMatrix:
    """Beamspace channel matrix and its aerial degrees of freedom."""

    matrix: ComplexArray
    adof: int


@dataclass(frozen=True)
class LosBeamspaceMatrix:
    """Deterministic LoS beamspace matrix with entries ``sqrt(gbar) e^{j phi}``."""

    phases: FloatArray
    avg_power: float

    def __post_init__(self) -> None:
        phases = np.asarray(self.phases, dtype=np.float64)
        if phases.ndim < 2:
            raise DimensionError(f"LoS phases need shape (..., M_R, M_T), got {phases.shape}")
        if self.avg_power <= 0.0:
            raise DomainError(f"avg_power must be positive, got {self.avg_power}")
        object.__setattr__(self, "phases", _readonly(phases, np.float64))

    @property
    def m_r(self) -> int:
        return int(self.phases.shape[-2])

    @property
    def m_t(self) -> int:
        return int(self.phases.shape[-1])

    @property
    def entries(self) -> ComplexArray:
        return np.asarray(math.sqrt(self.avg_power) * np.exp(1j * self.phases), dtype=np.complex128)


@dataclass(frozen=True)
class ScattererSet:
    """Scatterer gains for one slot plus the pattern responses toward each scatterer."""

    gains: ComplexArray
    departure_angles: FloatArray
    arrival_angles: FloatArray
    responses_t: ComplexArray
    responses_r: ComplexArray

    def __post_init__(self) -> None:
        q = np.asarray(self.gains).size
        if q < 1:
            raise DimensionError("a scatterer set needs at least one scatterer")
        for name in ("departure_angles", "arrival_angles"):
            if np.asarray(getattr(self, name)).size != q:
                raise DimensionError(f"{name} must have {q} entries")
        for name in ("responses_t", "responses_r"):
            if np.atleast_2d(getattr(self, name)).shape[1] != q:
                raise DimensionError(f"{name} must have {q} columns")

    @property
    def count(self) -> int:
        return int(np.asarray(self.gains).size)


@dataclass(frozen=True)
class RabLinks:
    """Fixed LoS beamspace matrices of the three links of one SU pair.

    Shapes are (M_R, M_T) for SU-SU, (1, M_T) for SU-PU and (M_R, 1) for
    PU-SU; a leading pair axis is allowed for multiuser networks.
    """

    su_su: LosBeamspaceMatrix
    su_pu: LosBeamspaceMatrix
    pu_su: LosBeamspaceMatrix
