import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import TextIO

from cube_core.generators import GENERATORS

from .checkers import CheckRequest
from .converters import as_input, sweep_points, to_verdict
from .interfaces import AbstractFunctionSource, AbstractReportWriter
from .models import Params, Report, RunConfig, VerdictRow
from .registry import Checker, Command, lookup

logger = logging.getLogger(__name__)


class VerificationManager:
    """
    Runs one command over every sweep point and hands the finished report to a writer.

    Points run on a thread pool; results are collected in sweep order, so the report does not
    depend on scheduling. Nothing is written until every point has finished.
    """

    def __init__(
        self,
        function_source: AbstractFunctionSource | None,
        report_writer: AbstractReportWriter,
        max_workers: int | None = None,
    ):
        self.function_source = function_source
        self.report_writer = report_writer
        self.max_workers = max_workers

    def run(self, config: RunConfig) -> Report:
        command, checker = lookup(config.command, config.theorem)
        if checker is None:
            return Report(command.name, zoo_rows())
        if self.function_source is None:
            raise ValueError(f"{command.name} needs a function source (--fn, --table, --product or --poly).")

        points = sweep_points(config.sweep)
        logger.info("Running %s/%s over %d sweep point(s)", command.name, checker.theorem, len(points))
        with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
            outcomes = list(pool.map(lambda point: self._run_point(config, command, checker, point), points))

        report = Report(command.name)
        for rows, verdicts in outcomes:
            report.rows.extend(rows)
            report.verdicts.extend(verdicts)
        failures = report.failures
        if failures:
            logger.warning(
                "%d of %d asserted checks failed: %s",
                len(failures),
                sum(v.asserted for v in report.verdicts),
                ", ".join(f"{v.instance}/{v.theorem}" for v in failures),
            )
        return report

    def _run_point(
        self, config: RunConfig, command: Command, checker: Checker, point: Params
    ) -> tuple[list[dict], list[VerdictRow]]:
        source = self.function_source
        assert source is not None
        source_keys = source.parameters()
        overrides = {k: v for k, v in point.items() if k in source_keys}
        seeded = {"seed": config.seed} if "seed" in checker.defaults else {}
        swept = {k: v for k, v in point.items() if k not in source_keys}
        params = checker.resolve({**seeded, **config.params, **swept})

        start = time.perf_counter()
        instance = source.load(overrides)
        function = as_input(instance, command.input_kind)
        outcome = checker.run(CheckRequest(function, params, config.tolerance, instance))
        elapsed_ms = (time.perf_counter() - start) * 1000.0
        logger.debug("%s/%s on %s took %.1f ms", command.name, checker.theorem, instance.id, elapsed_ms)

        rows = [{"instance": instance.id, **row} for row in outcome.rows]
        verdicts = []
        for result in outcome.results:
            verdict = to_verdict(instance, {**params, **overrides}, result)
            if config.timings:
                verdict.runtime_ms = elapsed_ms
            verdicts.append(verdict)
        return rows, verdicts

    def run_and_write(self, config: RunConfig, stream: TextIO) -> int:
        """Runs the command, writes the report and returns the exit status (0 pass, 1 failure)."""
        report = self.run(config)
        self.report_writer.write(report, stream)
        return report.exit_status


def zoo_rows() -> list[dict]:
    return [
        {"name": kind.name, "description": kind.description, "defaults": dict(kind.defaults)}
        for kind in GENERATORS.values()
    ]
