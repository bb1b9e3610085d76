"""Experiment harness: runs the selected experiments and writes their reports."""
import asyncio
from typing import List, Optional

from src.core.config import EXPERIMENT_NAMES, AppConfig, ExperimentConfig, get_config
from src.core.logging import get_logger
from src.domain.models import Report
from src.infrastructure.reporting.report_writer import ReportWriter
from src.services.experiments import ExperimentRunner

logger = get_logger(__name__)


def experiment_seed(seed: int, name: str) -> int:
    """Per-experiment seed: the run seed XOR the experiment's schedule index."""
    return seed ^ EXPERIMENT_NAMES.index(name)


class Harness:
    """
    Orchestrates one harness invocation.

    Experiments share nothing but the seed schedule, so the parallel mode
    produces the same report bodies as the sequential one.
    """

    def __init__(self, experiment_config: ExperimentConfig, config: Optional[AppConfig] = None):
        self.config = config or get_config()
        self.experiment_config = experiment_config
        self.runner = ExperimentRunner(self.config, experiment_config)
        self.writer = ReportWriter(experiment_config.output_dir)

    def _run_one(self, name: str) -> Report:
        return self.runner.run(name, experiment_seed(self.experiment_config.seed, name))

    async def _run_parallel(self, names: List[str]) -> List[Report]:
        return list(await asyncio.gather(*(asyncio.to_thread(self._run_one, name) for name in names)))

    def run(self) -> List[Report]:
        """
        Run the selected experiments, write their reports and the index.

        Returns:
            Reports in schedule order

        Raises:
            ReportWriteError: a report file could not be written
        """
        names = self.experiment_config.selected_experiments()
        logger.info("=" * 60)
        logger.info(
            f"Running {len(names)} experiment(s) with seed {self.experiment_config.seed}"
            f"{' in parallel' if self.experiment_config.parallel else ''}"
        )
        logger.info("=" * 60)

        if self.experiment_config.parallel and len(names) > 1:
            reports = asyncio.run(self._run_parallel(names))
        else:
            reports = [self._run_one(name) for name in names]

        self.writer.write_all(reports)
        failed = [r.experiment for r in reports if not r.passed]
        if failed:
            logger.warning(f"Failed experiments: {', '.join(failed)}")
        else:
            logger.info("All experiments passed")
        return reports


def run_all(experiment_config: ExperimentConfig, config: Optional[AppConfig] = None) -> List[Report]:
    """Run and report every selected experiment."""
    return Harness(experiment_config, config).run()
