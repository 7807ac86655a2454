"""Unit tests for experiment configuration, presets and result tables."""

import math
from pathlib import Path

import pytest

from underlay_sim.core.experiment_config import flatten_sections, load_config, parse_config, validate_config
from underlay_sim.core.models import Column, ExperimentConfig, ResultTable, Scenario, db_to_linear, linear_to_db
from underlay_sim.core.presets import get_runner, list_presets, merge_defaults, preset_config
from underlay_sim.exceptions import ConfigurationError

FIG8_TOML = """
experiment_id = "fig8"
seed = 7
runs = 2000

[channel]
k_factor_db = 10.0
gbar_p_db = 10.0

[sweep]
q_av_db = [0.0, 10.0]
rho = ["inf", 1.2]
"""

EXPERIMENTS_DIR = Path(__file__).resolve().parents[2] / "experiments"


class TestDecibels:
    """Tests for dB conversion helpers."""

    def test_round_trip_values(self) -> None:
        assert db_to_linear(10.0) == pytest.approx(10.0)
        assert db_to_linear(-10.0) == pytest.approx(0.1)
        assert linear_to_db(100.0) == pytest.approx(20.0)


class TestParseConfig:
    """Tests for TOML parsing and validation."""

    def test_sections_and_db_keys(self) -> None:
        cfg = parse_config(FIG8_TOML)
        assert cfg.experiment_id == "fig8"
        assert cfg.seed == 7
        assert cfg.k_factor == pytest.approx(10.0)
        assert cfg.gbar_p == pytest.approx(10.0)
        assert cfg.q_av == pytest.approx([1.0, 10.0])
        assert cfg.rho[0] == math.inf
        assert cfg.rho[1] == 1.2

    def test_preset_fills_missing_keys(self) -> None:
        cfg = parse_config(FIG8_TOML)
        assert cfg.scenarios[-1] == Scenario.AWGN
        assert len(cfg.scenarios) == 5

    def test_duplicate_key_names_field(self) -> None:
        with pytest.raises(ConfigurationError) as excinfo:
            flatten_sections({"a": {"runs": 1}, "b": {"runs": 2}})
        assert excinfo.value.field == "runs"

    def test_malformed_toml(self) -> None:
        with pytest.raises(ConfigurationError):
            parse_config("experiment_id = ")

    async def test_missing_file(self, tmp_path: Path) -> None:
        with pytest.raises(ConfigurationError) as excinfo:
            await load_config(tmp_path / "absent.toml")
        assert excinfo.value.field == "config"

    async def test_load_from_file(self, tmp_path: Path) -> None:
        path = tmp_path / "fig8.toml"
        path.write_text(FIG8_TOML, encoding="utf-8")
        assert (await load_config(path)).runs == 2000


class TestValidateConfig:
    """Tests for config validation errors."""

    @pytest.mark.parametrize(
        ("key", "value"),
        [
            ("rho", [0.5]),
            ("runs", 10),
            ("n_list", [4, 2]),
            ("q_av", [0.0]),
            ("basis_counts", [0]),
            ("bogus", 1),
        ],
    )
    def test_error_names_field(self, key: str, value: object) -> None:
        with pytest.raises(ConfigurationError) as excinfo:
            validate_config({"experiment_id": "fig8", key: value})
        assert excinfo.value.field == key

    def test_linear_and_db_together(self) -> None:
        with pytest.raises(ConfigurationError):
            validate_config({"experiment_id": "fig8", "k_factor": 10.0, "k_factor_db": 10.0})

    def test_missing_experiment_id(self) -> None:
        with pytest.raises(ConfigurationError) as excinfo:
            validate_config({"runs": 5000})
        assert excinfo.value.field == "experiment_id"

    def test_sample_count_defaults_to_runs(self) -> None:
        cfg = ExperimentConfig(experiment_id="custom", runs=5000)
        assert cfg.sample_count == 5000
        assert ExperimentConfig(experiment_id="custom", samples=10).sample_count == 10


class TestPresets:
    """Tests for the figure preset registry."""

    def test_figure_order(self) -> None:
        ids = [p.figure_id for p in list_presets()]
        assert ids == ["fig7", "fig8", "fig9", "fig10", "fig11", "fig12", "fig13", "fig14", "fig15", "fig16"]

    def test_user_keys_win(self) -> None:
        merged = merge_defaults({"experiment_id": "fig13", "basis_counts": [4]})
        assert merged["basis_counts"] == [4]
        assert merged["rho"] == ["inf"]

    def test_db_key_blocks_linear_default(self) -> None:
        merged = merge_defaults({"experiment_id": "fig13", "q_av_db": [3.0]})
        assert "q_av" not in merged
        assert validate_config(merged).q_av == pytest.approx([db_to_linear(3.0)])

    def test_linear_key_blocks_db_default(self) -> None:
        merged = merge_defaults({"experiment_id": "fig9", "gbar_s_sweep": [1.0]})
        assert "gbar_s_sweep_db" not in merged

    def test_unknown_id_passes_through(self) -> None:
        assert merge_defaults({"experiment_id": "custom", "runs": 5}) == {"experiment_id": "custom", "runs": 5}

    def test_preset_overrides(self) -> None:
        data = preset_config("fig14", seed=3, runs=2_000)
        cfg = validate_config(data)
        assert cfg.seed == 3
        assert cfg.runs == 2_000
        assert Scenario.RAYLEIGH_RAYLEIGH in cfg.scenarios

    def test_unknown_preset(self) -> None:
        with pytest.raises(ConfigurationError) as excinfo:
            get_runner("fig99")
        assert excinfo.value.field == "experiment_id"
        with pytest.raises(ConfigurationError):
            preset_config("fig99")


class TestResultTable:
    """Tests for the result table schema."""

    def test_headers_carry_units(self) -> None:
        table = ResultTable(columns=[Column(name="q_av", unit="db"), Column(name="capacity")])
        assert table.headers == ["q_av_db", "capacity"]

    def test_arity_enforced(self) -> None:
        table = ResultTable(columns=[Column(name="a"), Column(name="b")])
        table.append([1, 2.0])
        with pytest.raises(ValueError):
            table.append([1])
        with pytest.raises(ValueError):
            ResultTable(columns=[Column(name="a")], rows=[[1, 2]])

    def test_column_lookup(self) -> None:
        table = ResultTable(columns=[Column(name="n"), Column(name="x", unit="db")], rows=[[1, 0.5], [2, 0.7]])
        assert table.column("x") == [0.5, 0.7]


@pytest.mark.parametrize("path", sorted(EXPERIMENTS_DIR.glob("*.toml")), ids=lambda p: p.stem)
async def test_shipped_experiment_files_validate(path: Path) -> None:
    cfg = await load_config(path)
    assert cfg.experiment_id == path.stem
    get_runner(cfg.experiment_id)
