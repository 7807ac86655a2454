"""Figure presets: default parameters and the pipeline behind each figure id."""

import logging
from collections.abc import Awaitable, Callable
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..allocation.capacity import awgn_capacity, capacity_sweep
from ..antennas.rab import draw_los_matrix, draw_rab_links, sample_artificial_fading, sample_equivalent_channels
from ..channels.fading import sample_rician, scenario_system
from ..exceptions import ConfigurationError
from ..scheduling.multiuser import (
    SCALING_COLUMNS,
    append_reference_rows,
    append_scaling_rows,
    scaling_capacities_parallel,
)
from ..types import ComplexArray
from .config import Settings
from .executor import MonteCarloExecutor, StreamFamily
from .models import (
    ChannelSpec,
    Column,
    ExperimentConfig,
    RabConfig,
    ReceiveMode,
    ResultTable,
    Scenario,
    SystemSpec,
    linear_to_db,
)

logger = logging.getLogger("underlay_sim.presets")

Runner = Callable[[ExperimentConfig, MonteCarloExecutor, Settings], Awaitable[ResultTable]]

DISTRIBUTION_COLUMNS = [
    Column(name="series"),
    Column(name="sample_index"),
    Column(name="re"),
    Column(name="im"),
    Column(name="abs"),
]

SWEEP_COLUMNS = [
    Column(name="q_av", unit="db"),
    Column(name="scenario"),
    Column(name="rho"),
    Column(name="capacity", unit="bps_hz"),
    Column(name="std_err"),
]

NORMALIZED_SWEEP_COLUMNS = [
    Column(name="q_av", unit="db"),
    Column(name="gbar_s", unit="db"),
    Column(name="capacity", unit="bps_hz"),
    Column(name="awgn_capacity", unit="bps_hz"),
    Column(name="normalized_capacity"),
    Column(name="std_err"),
]

BASIS_SWEEP_COLUMNS = [
    Column(name="m"),
    Column(name="scenario"),
    Column(name="receive_mode"),
    Column(name="capacity", unit="bps_hz"),
    Column(name="std_err"),
]

FADING_SCENARIOS = ["rician-rician", "rician-rayleigh", "rayleigh-rayleigh", "rayleigh-rician"]


class FigurePreset(BaseModel):
    """Registered figure: id, description and config defaults."""

    model_config = ConfigDict(frozen=True)

    figure_id: str = Field(..., min_length=1)
    description: str
    defaults: dict[str, Any] = Field(default_factory=dict)


PRESETS: dict[str, FigurePreset] = {}
_RUNNERS: dict[str, Runner] = {}


def _register(figure_id: str, description: str, **defaults: Any) -> Callable[[Runner], Runner]:
    def decorator(runner: Runner) -> Runner:
        PRESETS[figure_id] = FigurePreset(figure_id=figure_id, description=description, defaults=defaults)
        _RUNNERS[figure_id] = runner
        return runner

    return decorator


def get_runner(experiment_id: str) -> Runner:
    """Pipeline registered for an experiment id.

    Raises:
        ConfigurationError: If the id is unknown
    """
    try:
        return _RUNNERS[experiment_id]
    except KeyError:
        known = ", ".join(sorted(PRESETS, key=_figure_order))
        raise ConfigurationError(
            f"unknown experiment_id '{experiment_id}' (known: {known})", field="experiment_id"
        ) from None


def _figure_order(figure_id: str) -> tuple[int, str]:
    digits = "".join(ch for ch in figure_id if ch.isdigit())
    return (int(digits) if digits else 0, figure_id)


def list_presets() -> list[FigurePreset]:
    """Registered presets in figure order."""
    return [PRESETS[k] for k in sorted(PRESETS, key=_figure_order)]


def merge_defaults(data: dict[str, Any]) -> dict[str, Any]:
    """Fill keys missing from a raw config with the preset defaults of its experiment id.

    A default is skipped when the config sets the same quantity in either
    linear or dB form.
    """
    preset = PRESETS.get(str(data.get("experiment_id", "")))
    if preset is None:
        return dict(data)
    merged = dict(data)
    for key, value in preset.defaults.items():
        base = key[: -len("_db")] if key.endswith("_db") else key
        if base in data or f"{base}_db" in data:
            continue
        merged[key] = value
    return merged


def preset_config(
    figure_id: str,
    seed: int | None = None,
    runs: int | None = None,
    output_path: str | None = None,
) -> dict[str, Any]:
    """Raw config of a figure preset with optional overrides.

    Raises:
        ConfigurationError: If the figure id is unknown
    """
    get_runner(figure_id)
    data: dict[str, Any] = {"experiment_id": figure_id}
    if seed is not None:
        data["seed"] = seed
    if runs is not None:
        data["runs"] = runs
    if output_path is not None:
        data["output_path"] = output_path
    return merge_defaults(data)


def _append_samples(table: ResultTable, series: str, values: ComplexArray) -> None:
    flat = np.asarray(values).ravel()
    for i, v in enumerate(flat):
        table.append([series, i, float(v.real), float(v.imag), float(abs(v))])


def _q_av_db(q_av: float) -> float:
    return round(linear_to_db(q_av), 10)


def _system(cfg: ExperimentConfig, scenario: Scenario, gbar_s: float | None = None) -> SystemSpec:
    return scenario_system(
        scenario,
        cfg.k_factor,
        cfg.gbar_s if gbar_s is None else gbar_s,
        cfg.gbar_sp,
        cfg.gbar_ps,
        cfg.gbar_p,
    )


# Distribution presets
@_register(
    "fig7",
    "Artificial fading samples |U| on the SU-PU link for several transmit basis counts",
    samples=10_000,
    basis_counts=[1, 2, 3, 5, 10],
)
async def _fig7(cfg: ExperimentConfig, executor: MonteCarloExecutor, settings: Settings) -> ResultTable:
    table = ResultTable(columns=list(DISTRIBUTION_COLUMNS))
    spec = ChannelSpec(k_factor=cfg.k_factor, avg_power=cfg.gbar_sp)
    for index, m in enumerate(cfg.basis_counts):
        los = draw_los_matrix(1, m, spec.avg_power, executor.stream(StreamFamily.GEOMETRY, index))
        values = await executor.run_blocking(
            sample_artificial_fading, spec, los, cfg.sample_count, executor.stream(StreamFamily.SAMPLES, index)
        )
        _append_samples(table, f"mt={m}", values)
    return table


@_register(
    "fig10",
    "SU-PU interference channel samples before and after RAB",
    samples=10_000,
    basis_counts=[1, 2, 3, 5, 8],
)
async def _fig10(cfg: ExperimentConfig, executor: MonteCarloExecutor, settings: Settings) -> ResultTable:
    table = ResultTable(columns=list(DISTRIBUTION_COLUMNS))
    spec = ChannelSpec(k_factor=cfg.k_factor, avg_power=cfg.gbar_sp)
    before = sample_rician(spec, executor.stream(StreamFamily.SAMPLES, 0), cfg.sample_count)
    _append_samples(table, "before", before)
    for index, m in enumerate(cfg.basis_counts, start=1):
        los = draw_los_matrix(1, m, spec.avg_power, executor.stream(StreamFamily.GEOMETRY, index))
        values = await executor.run_blocking(
            sample_equivalent_channels, spec, los, cfg.sample_count, executor.stream(StreamFamily.SAMPLES, index)
        )
        _append_samples(table, f"mt={m}", values)
    return table


@_register(
    "fig11",
    "Time series of the SU-PU channel before and after RAB",
    samples=200,
)
async def _fig11(cfg: ExperimentConfig, executor: MonteCarloExecutor, settings: Settings) -> ResultTable:
    table = ResultTable(columns=list(DISTRIBUTION_COLUMNS))
    spec = ChannelSpec(k_factor=cfg.k_factor, avg_power=cfg.gbar_sp)
    before = sample_rician(spec, executor.stream(StreamFamily.SAMPLES, 0), cfg.sample_count)
    _append_samples(table, "before", before)
    los = draw_los_matrix(cfg.m_r, cfg.m_t, spec.avg_power, executor.stream(StreamFamily.GEOMETRY, 0))
    after = sample_equivalent_channels(spec, los, cfg.sample_count, executor.stream(StreamFamily.SAMPLES, 1))
    _append_samples(table, "after", after)
    return table


@_register(
    "fig12",
    "SU-SU channel samples after RAB with smart receive basis patterns",
    samples=10_000,
    basis_counts=[1, 2, 4, 8],
)
async def _fig12(cfg: ExperimentConfig, executor: MonteCarloExecutor, settings: Settings) -> ResultTable:
    table = ResultTable(columns=list(DISTRIBUTION_COLUMNS))
    spec = ChannelSpec(k_factor=cfg.k_factor, avg_power=cfg.gbar_s)
    before = sample_rician(spec, executor.stream(StreamFamily.SAMPLES, 0), cfg.sample_count)
    _append_samples(table, "before", before)
    for index, m_r in enumerate(cfg.basis_counts, start=1):
        los = draw_los_matrix(m_r, cfg.m_t, spec.avg_power, executor.stream(StreamFamily.GEOMETRY, index))
        values = await executor.run_blocking(
            sample_equivalent_channels,
            spec,
            los,
            cfg.sample_count,
            executor.stream(StreamFamily.SAMPLES, index),
            ReceiveMode.SMART,
        )
        _append_samples(table, f"mr={m_r}", values)
    return table


# Capacity sweeps
@_register(
    "fig8",
    "Ergodic SU capacity versus Q_av for the fading scenarios, rho in {inf, 1.2}",
    scenarios=[*FADING_SCENARIOS, "awgn"],
)
async def _fig8(cfg: ExperimentConfig, executor: MonteCarloExecutor, settings: Settings) -> ResultTable:
    table = ResultTable(columns=list(SWEEP_COLUMNS))
    for scenario in cfg.scenarios:
        system = _system(cfg, scenario)
        for rho in cfg.rho:
            points = await capacity_sweep(
                system, cfg.q_av, rho, cfg.runs, executor, max_tx_power=settings.max_tx_power
            )
            for point in points:
                table.append(
                    [_q_av_db(point.q_av), scenario.value, rho, point.estimate.capacity, point.estimate.std_err]
                )
            logger.info(f"  {scenario.value}, rho={rho:g}: {len(points)} points")
    return table


@_register(
    "fig9",
    "Rayleigh-Rician capacity normalized by the AWGN capacity for several SU SNRs",
    gbar_s_sweep_db=[0.0, 10.0, 20.0],
    rho=["inf"],
)
async def _fig9(cfg: ExperimentConfig, executor: MonteCarloExecutor, settings: Settings) -> ResultTable:
    table = ResultTable(columns=list(NORMALIZED_SWEEP_COLUMNS))
    rho = cfg.rho[0]
    for gbar_s in cfg.gbar_s_sweep or [cfg.gbar_s]:
        system = _system(cfg, Scenario.RAYLEIGH_RICIAN, gbar_s)
        points = await capacity_sweep(system, cfg.q_av, rho, cfg.runs, executor, max_tx_power=settings.max_tx_power)
        for point in points:
            reference = awgn_capacity(point.q_av, gbar_s, cfg.gbar_sp, cfg.gbar_ps, cfg.gbar_p)
            table.append(
                [
                    _q_av_db(point.q_av),
                    round(linear_to_db(gbar_s), 10),
                    point.estimate.capacity,
                    reference,
                    point.estimate.capacity / reference,
                    point.estimate.std_err / reference,
                ]
            )
    return table


@_register(
    "fig13",
    "Capacity versus the number of basis patterns with RAB",
    basis_counts=[1, 2, 3, 5, 8],
    q_av=[1.0],
    rho=["inf"],
)
async def _fig13(cfg: ExperimentConfig, executor: MonteCarloExecutor, settings: Settings) -> ResultTable:
    table = ResultTable(columns=list(BASIS_SWEEP_COLUMNS))
    q_av, rho = cfg.q_av[0], cfg.rho[0]
    reference_system = _system(cfg, Scenario.RAYLEIGH_RAYLEIGH)
    (reference,) = await capacity_sweep(
        reference_system, [q_av], rho, cfg.runs, executor, max_tx_power=settings.max_tx_power
    )
    cases = ((Scenario.RICIAN_RAYLEIGH, ReceiveMode.RANDOM), (Scenario.RICIAN_RICIAN, ReceiveMode.SMART))
    for index, m in enumerate(cfg.basis_counts):
        for scenario, mode in cases:
            system = _system(cfg, scenario)
            rab = RabConfig(m_t=m, m_r=m, receive_mode=mode)
            links = draw_rab_links(system, rab, executor.stream(StreamFamily.GEOMETRY, index))
            (point,) = await capacity_sweep(
                system, [q_av], rho, cfg.runs, executor, rab, links, settings.max_tx_power
            )
            table.append([m, scenario.value, mode.value, point.estimate.capacity, point.estimate.std_err])
        table.append(
            [
                m,
                Scenario.RAYLEIGH_RAYLEIGH.value,
                "none",
                reference.estimate.capacity,
                reference.estimate.std_err,
            ]
        )
    return table


# Capacity scaling
async def _scaling_rows(
    table: ResultTable,
    cfg: ExperimentConfig,
    executor: MonteCarloExecutor,
    scenario: Scenario,
    rab: RabConfig | None,
) -> None:
    system = _system(cfg, scenario)
    needed = sorted(set(cfg.n_list) | {1})
    capacities = await scaling_capacities_parallel(system, needed, cfg.runs, executor, cfg.q_p, rab)
    append_scaling_rows(table, scenario.value, rab, cfg.n_list, capacities)
    logger.info(f"  {scenario.value} (rab={'yes' if rab else 'no'}): N up to {cfg.n_list[-1]}")


async def _reference_rows(table: ResultTable, cfg: ExperimentConfig, executor: MonteCarloExecutor) -> None:
    rng = executor.stream(StreamFamily.REFERENCE)
    await executor.run_blocking(append_reference_rows, table, cfg.n_list, cfg.runs, rng, cfg.gbar_s)


@_register(
    "fig14",
    "Normalized PAC sum capacity versus the number of SU pairs, no RAB",
    scenarios=list(FADING_SCENARIOS),
)
async def _fig14(cfg: ExperimentConfig, executor: MonteCarloExecutor, settings: Settings) -> ResultTable:
    table = ResultTable(columns=list(SCALING_COLUMNS))
    for scenario in cfg.scenarios:
        await _scaling_rows(table, cfg, executor, scenario, None)
    await _reference_rows(table, cfg, executor)
    return table


async def _rab_scaling(cfg: ExperimentConfig, executor: MonteCarloExecutor, table: ResultTable) -> None:
    rab = RabConfig(m_t=cfg.m_t, m_r=cfg.m_r)
    for scenario in cfg.scenarios:
        await _scaling_rows(table, cfg, executor, scenario, None)
    for scenario in cfg.scenarios:
        if scenario.value.startswith("rician"):
            await _scaling_rows(table, cfg, executor, scenario, rab)


@_register(
    "fig15",
    "Normalized PAC sum capacity with RAB on Rician interference links",
    scenarios=["rician-rayleigh", "rayleigh-rayleigh"],
    m_t=2,
    m_r=2,
)
async def _fig15(cfg: ExperimentConfig, executor: MonteCarloExecutor, settings: Settings) -> ResultTable:
    table = ResultTable(columns=list(SCALING_COLUMNS))
    await _rab_scaling(cfg, executor, table)
    return table


@_register(
    "fig16",
    "PAC sum capacity normalized by the ln N and ln ln N growth functions",
    scenarios=["rician-rayleigh", "rayleigh-rayleigh"],
    m_t=2,
    m_r=2,
)
async def _fig16(cfg: ExperimentConfig, executor: MonteCarloExecutor, settings: Settings) -> ResultTable:
    table = ResultTable(columns=list(SCALING_COLUMNS))
    await _rab_scaling(cfg, executor, table)
    await _reference_rows(table, cfg, executor)
    return table


def describe(figure_id: str) -> str:
    """One-line description of a preset, with its non-default parameters."""
    preset = PRESETS[figure_id]
    params = ", ".join(f"{k}={v}" for k, v in preset.defaults.items())
    return f"{preset.figure_id}: {preset.description}" + (f" [{params}]" if params else "")
