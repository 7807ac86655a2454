"""Experiment orchestrator: config in, deterministic result table out."""

import asyncio
import logging
import time
from pathlib import Path

from .. import __version__
from ..utils.file_utils import write_table_async
from ..utils.logging import log_dict, setup_logging
from .config import Settings
from .executor import MonteCarloExecutor
from .models import ExperimentConfig, ResultTable
from .presets import get_runner

logger = logging.getLogger("underlay_sim.experiment")


class ExperimentRunner:
    """Runs figure pipelines on a seeded Monte Carlo executor."""

    def __init__(self, settings: Settings):
        """Initialize runner with settings.

        Args:
            settings: Runtime settings (worker count, chunk size, numerical guards)
        """
        self.settings = settings
        setup_logging(settings.log_level, settings.debug)

    async def execute(self, cfg: ExperimentConfig) -> ResultTable:
        """Run one experiment.

        The result depends only on the config and the chunk size, never on
        the number of workers.

        Args:
            cfg: Validated experiment config

        Returns:
            Result table with metadata (config echo, seed, version)

        Raises:
            ConfigurationError: If the experiment id is unknown
            NumericalError: If a numerical step fails
        """
        runner = get_runner(cfg.experiment_id)
        start_time = time.time()
        workers = self.settings.resolved_workers()

        logger.info(f"Experiment {cfg.experiment_id}: seed={cfg.seed}, runs={cfg.runs}, workers={workers}")
        with MonteCarloExecutor(cfg.seed, workers=workers, chunk_size=self.settings.chunk_size) as executor:
            table = await runner(cfg, executor, self.settings)

        table.metadata.update(
            {
                "experiment_id": cfg.experiment_id,
                "seed": str(cfg.seed),
                "runs": str(cfg.runs),
                "chunk_size": str(self.settings.chunk_size),
                "version": __version__,
                "config": cfg.model_dump_json(exclude={"output_path"}),
            }
        )
        log_dict(
            logger,
            logging.INFO,
            "Experiment finished",
            {
                "experiment_id": cfg.experiment_id,
                "rows": len(table.rows),
                "elapsed_s": f"{time.time() - start_time:.1f}",
            },
        )
        return table

    async def execute_and_write(self, cfg: ExperimentConfig, output_path: Path | None = None) -> ResultTable:
        """Run an experiment and write its CSV.

        The path defaults to the config's ``output_path`` and then to
        ``<output_dir>/<experiment_id>.csv``.

        Raises:
            FileOperationError: If the CSV cannot be written
        """
        table = await self.execute(cfg)
        path = output_path or Path(cfg.output_path or Path(self.settings.output_dir) / f"{cfg.experiment_id}.csv")
        await write_table_async(path, table)
        logger.info(f"Wrote {len(table.rows)} rows to {path}")
        return table


def run_experiment(cfg: ExperimentConfig, settings: Settings | None = None) -> ResultTable:
    """Synchronous entry point: run an experiment and return its table (no file output)."""
    runner = ExperimentRunner(settings or Settings())
    return asyncio.run(runner.execute(cfg))
