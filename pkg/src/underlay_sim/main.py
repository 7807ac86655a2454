"""CLI entry point for the underlay simulator."""

import argparse
import asyncio
import sys
from collections.abc import Callable
from pathlib import Path

from pydantic import ValidationError

from .antennas.espar import export_patterns, orthonormal_basis
from .core.config import Settings
from .core.experiment import ExperimentRunner
from .core.experiment_config import load_config, validate_config
from .core.models import EsparGeometry, ExperimentConfig, ResultTable
from .core.presets import describe, list_presets, preset_config
from .exceptions import ConfigurationError, UnderlaySimError
from .numerics.specfun import bessel_i0, bessel_i1, exp_integral_e1, harmonic, laguerre_half, marcum_q1
from .utils.file_utils import render_csv, write_table_async

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_INTERRUPTED = 130

SPECIAL_FUNCTIONS: dict[str, tuple[int, Callable[..., float]]] = {
    "i0": (1, bessel_i0),
    "i1": (1, bessel_i1),
    "e1": (1, exp_integral_e1),
    "laguerre_half": (1, laguerre_half),
    "marcum_q1": (2, marcum_q1),
    "harmonic": (1, lambda n: harmonic(int(n))),
}


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with the run, figure, list-figures, specfun and patterns commands."""
    parser = argparse.ArgumentParser(
        prog="underlay-sim",
        description="Underlay cognitive radio simulator - capacity, RAB and multiuser scaling experiments",
    )
    parser.add_argument(
        "--debug",
        action="store_true",
        help="Enable debug logging",
    )
    parser.add_argument(
        "--workers",
        "-w",
        type=int,
        help="Worker threads (overrides UNDERLAY_WORKERS; results do not depend on it)",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run an experiment file")
    run.add_argument("config", type=Path, help="TOML experiment file")
    run.add_argument("--out", "-o", type=Path, help="CSV output path")

    figure = commands.add_parser("figure", help="Run a figure preset")
    figure.add_argument("figure_id", help="Preset id, e.g. fig8")
    figure.add_argument("--seed", type=int, help="Experiment seed")
    figure.add_argument("--runs", type=int, help="Monte Carlo runs")
    figure.add_argument("--out", "-o", type=Path, help="CSV output path")

    commands.add_parser("list-figures", help="List the figure presets")

    specfun = commands.add_parser("specfun", help="Evaluate a special function")
    specfun.add_argument("name", choices=sorted(SPECIAL_FUNCTIONS), help="Function name")
    specfun.add_argument("args", nargs="+", type=float, help="Arguments")

    patterns = commands.add_parser("patterns", help="Export ESPAR basis patterns as CSV")
    patterns.add_argument("--elements", "-m", type=int, default=3, help="Number of elements (default: 3)")
    patterns.add_argument(
        "--radius", type=float, default=0.25, help="Array radius in wavelengths (default: 0.25)"
    )
    patterns.add_argument("--grid", type=int, help="Angular grid size")
    patterns.add_argument("--out", "-o", type=Path, help="CSV output path (default: stdout)")
    return parser


def _settings(args: argparse.Namespace) -> Settings:
    settings = Settings()
    if args.debug:
        settings.debug = True
    if args.workers is not None:
        if args.workers < 1:
            raise ConfigurationError("--workers must be >= 1", field="workers")
        settings.workers = args.workers
    return settings


def _with_settings_defaults(cfg: ExperimentConfig, settings: Settings) -> ExperimentConfig:
    """Fill a seed or run count the experiment leaves out from the settings."""
    updates: dict[str, int] = {}
    if "seed" not in cfg.model_fields_set:
        updates["seed"] = settings.default_seed
    if "runs" not in cfg.model_fields_set:
        updates["runs"] = settings.default_runs
    return cfg.model_copy(update=updates)


async def _execute(args: argparse.Namespace, settings: Settings) -> tuple[ExperimentConfig, ResultTable]:
    if args.command == "run":
        cfg = await load_config(args.config)
    else:
        cfg = validate_config(preset_config(args.figure_id, seed=args.seed, runs=args.runs))
    cfg = _with_settings_defaults(cfg, settings)
    table = await ExperimentRunner(settings).execute_and_write(cfg, args.out)
    return cfg, table


def _run_experiment(args: argparse.Namespace, settings: Settings) -> int:
    cfg, table = asyncio.run(_execute(args, settings))
    print(f"{cfg.experiment_id}: {len(table.rows)} rows")
    return EXIT_OK


def _specfun(args: argparse.Namespace) -> int:
    arity, fn = SPECIAL_FUNCTIONS[args.name]
    if len(args.args) != arity:
        raise ConfigurationError(f"{args.name} takes {arity} argument(s), got {len(args.args)}", field="args")
    print(repr(fn(*args.args)))
    return EXIT_OK


def _patterns(args: argparse.Namespace) -> int:
    geometry = EsparGeometry(num_elements=args.elements, radius_wavelengths=args.radius)
    table = export_patterns(orthonormal_basis(geometry, args.grid))
    if args.out is None:
        sys.stdout.write(render_csv(table))
    else:
        asyncio.run(write_table_async(args.out, table))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    """Main CLI entry point.

    Returns:
        Exit code (0 success, 2 configuration error, 3 numerical failure, 130 interrupted)
    """
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        if args.command == "list-figures":
            for preset in list_presets():
                print(describe(preset.figure_id))
            return EXIT_OK
        if args.command == "specfun":
            return _specfun(args)
        if args.command == "patterns":
            return _patterns(args)
        return _run_experiment(args, _settings(args))

    except ConfigurationError as e:
        where = f" (field: {e.field})" if e.field else ""
        print(f"Configuration error{where}: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ValidationError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except UnderlaySimError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except KeyboardInterrupt:
        print("\nInterrupted by user", file=sys.stderr)
        return EXIT_INTERRUPTED
    except Exception as e:
        print(f"Unexpected error: {e}", file=sys.stderr)
        if args.debug:
            import traceback

            traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
