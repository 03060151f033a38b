from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
import csv
import math
import statistics

from aws_lambda_powertools import Logger
from aws_lambda_powertools.metrics import Metrics, MetricUnit
import numpy as np

from common.constants.metrics import (
    METRICS_NAMESPACE,
    POLICY_DIMENSION,
    EXPERIMENT_CELL_COMPLETED,
    EXPERIMENT_CELL_FAILED,
    SIMULATION_RUN,
)
from common.constants.services import SERVICE
from common.helpers.policy_helper import build_policy, hesrpt_mean_flow_time, knee_alpha_sweep
from common.helpers.simulator_helper import Simulator
from common.models.experiment import AggregateRow, ExperimentConfig, ResultRow, ResultTable
from common.models.job import JobSet
from common.models.speedup import SpeedupFunction
from exceptions.experiment_exceptions import (
    DistributionSpecParseException,
    ExperimentIOException,
    InvalidExperimentConfigException,
    SizesFileException,
)
from exceptions.simulator_exceptions import LivelockException, PolicyContractViolationException

RAW_HEADER = ["policy", "p", "seed", "total_flow_time", "mean_flow_time", "makespan"]
AGGREGATE_HEADER = ["policy", "p", "median_mean_flow_time", "ratio_to_hesrpt"]

RAW_FILE = "raw.csv"
AGGREGATE_FILE = "aggregate.csv"
PLOT_FILE = "plot_data.csv"


def pareto_inverse_cdf(u, shape: float, scale: float):
    """x = scale * u^(-1/shape) for u in (0, 1]."""
    return scale * np.power(u, -1.0 / shape)


def sample_pareto(shape: float, scale: float, count: int, seed: int) -> list[float]:
    """
    Seeded Pareto sizes by inverse-CDF sampling.

    The generator is numpy's PCG64 (`default_rng(seed)`), and U = 1 - random()
    so U lies in (0, 1]. Same seed, same numbers.
    """
    if not shape > 0:
        raise InvalidExperimentConfigException("pareto_shape", shape, "must be positive")
    if not scale > 0:
        raise InvalidExperimentConfigException("pareto_scale", scale, "must be positive")
    rng = np.random.default_rng(seed)
    uniforms = 1.0 - rng.random(count)
    return pareto_inverse_cdf(uniforms, shape, scale).tolist()


def parse_distribution(spec: str) -> tuple[float, float]:
    """
    Parse 'pareto:shape=1.5,scale=1' into (shape, scale). Scale defaults to 1.
    """
    kind, sep, params = spec.strip().partition(":")
    if kind.lower() != "pareto":
        raise DistributionSpecParseException(spec, "only 'pareto' workloads are supported")

    values = {"shape": None, "scale": 1.0}
    for item in filter(None, (part.strip() for part in params.split(","))) if sep else []:
        key, eq, value = item.partition("=")
        if not eq or key.strip() not in values:
            raise DistributionSpecParseException(spec, f"unexpected parameter '{item}'")
        try:
            values[key.strip()] = float(value)
        except ValueError:
            raise DistributionSpecParseException(spec, f"'{value}' is not a number")

    if values["shape"] is None:
        raise DistributionSpecParseException(spec, "missing shape")
    return values["shape"], values["scale"]


def load_sizes(path: str) -> list[float]:
    """Job sizes from a CSV with header 'size', one positive real per row."""
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            reader = csv.DictReader(handle)
            if reader.fieldnames is None or [name.strip() for name in reader.fieldnames] != ["size"]:
                raise SizesFileException(path, reason="header must be 'size'")
            sizes = []
            for line_number, row in enumerate(reader, start=2):
                try:
                    size = float(row["size"])
                except (TypeError, ValueError):
                    raise SizesFileException(path, line_number, f"'{row['size']}' is not a number")
                if not size > 0 or math.isinf(size):
                    raise SizesFileException(path, line_number, f"size {size} is not positive")
                sizes.append(size)
    except OSError as exc:
        raise ExperimentIOException(path, str(exc))

    if not sizes:
        raise SizesFileException(path, reason="no job sizes")
    return sizes


def _run_cell(config: ExperimentConfig, policy: str, p: float, seed: int, sizes: list[float]) -> ResultRow:
    """Simulate one (policy, p, seed) cell. Contract violations mark the row failed."""
    jobs = JobSet.from_sizes(sizes)
    speedup = SpeedupFunction.power_law(p)
    run_id = f"{policy}-p{p}-s{seed}"
    logger = Logger(service=SERVICE)

    try:
        if policy == "knee":
            alpha, trajectory = knee_alpha_sweep(
                jobs, p, config.n_servers, config.knee_granularity, config.knee_alpha_grid, run_id=run_id
            )
        else:
            alpha = None
            trajectory = Simulator(run_id=run_id).run(
                build_policy(policy, granularity=config.hell_granularity),
                jobs,
                config.n_servers,
                speedup,
                record_phases=False,
            )
    except (LivelockException, PolicyContractViolationException) as exc:
        logger.warning(f"Cell {run_id} failed: {exc}")
        return ResultRow(
            policy=policy,
            p=p,
            seed=seed,
            total_flow_time=math.nan,
            mean_flow_time=math.nan,
            makespan=math.nan,
            failed=True,
        )

    return ResultRow(
        policy=policy,
        p=p,
        seed=seed,
        total_flow_time=trajectory.totals.total_flow_time,
        mean_flow_time=trajectory.totals.mean_flow_time,
        makespan=trajectory.totals.makespan,
        knee_alpha=alpha,
    )


def _run_cell_args(args) -> ResultRow:
    return _run_cell(*args)


def _format(value: float) -> str:
    return "nan" if math.isnan(value) else repr(float(value))


class ExperimentHelper:
    """
    Policy sweep over seeded Pareto workloads: every (seed, p, policy) cell is
    simulated, then medians over seeds and ratios to heSRPT are aggregated.
    """

    def __init__(self, run_id: str = None):
        self.logger = Logger(service=SERVICE)
        if run_id:
            self.logger.append_keys(run_id=run_id)
        self.metrics = Metrics(namespace=METRICS_NAMESPACE, service=SERVICE)

    def workloads(self, config: ExperimentConfig) -> dict[int, list[float]]:
        """Sizes per seed, sorted descending; shared by every p and policy."""
        return {
            seed: sorted(
                sample_pareto(config.pareto_shape, config.pareto_scale, config.n_jobs, seed),
                reverse=True,
            )
            for seed in config.seeds
        }

    def run_matrix(self, config: ExperimentConfig) -> ResultTable:
        """
        Run every cell and aggregate. Output depends only on config: cells are
        sorted by (policy, p, seed) whether they ran in one process or many.
        """
        workloads = self.workloads(config)
        cells = [
            (config, policy, p, seed, workloads[seed])
            for policy in config.policies
            for p in config.p_values
            for seed in config.seeds
        ]
        self.logger.info(
            f"Running {len(cells)} cells: policies {config.policies}, p {config.p_values}, "
            f"{config.n_seeds} seeds, M={config.n_jobs}, N={config.n_servers}, workers {config.workers}"
        )

        if config.workers > 1:
            with ProcessPoolExecutor(max_workers=config.workers) as pool:
                rows = list(pool.map(_run_cell_args, cells))
        else:
            rows = [_run_cell_args(cell) for cell in cells]

        policy_rank = {policy: index for index, policy in enumerate(config.policies)}
        p_rank = {p: index for index, p in enumerate(config.p_values)}
        rows.sort(key=lambda row: (policy_rank[row.policy], p_rank[row.p], row.seed))

        for policy in config.policies:
            outcomes = [row.failed for row in rows if row.policy == policy]
            self.metrics.add_dimension(name=POLICY_DIMENSION, value=policy)
            self.metrics.add_metric(
                name=EXPERIMENT_CELL_COMPLETED, unit=MetricUnit.Count, value=outcomes.count(False)
            )
            self.metrics.add_metric(
                name=EXPERIMENT_CELL_FAILED, unit=MetricUnit.Count, value=outcomes.count(True)
            )
            self.metrics.add_metric(name=SIMULATION_RUN, unit=MetricUnit.Count, value=len(outcomes))
            self.metrics.flush_metrics()

        table = ResultTable(
            policies=list(config.policies),
            p_values=list(config.p_values),
            rows=rows,
            aggregates=self._aggregate(config, rows, workloads),
        )
        failed = sum(row.failed for row in rows)
        if failed:
            self.logger.warning(f"{failed} of {len(rows)} cells failed")
        self.logger.info(f"Experiment finished with {len(table.aggregates)} aggregate rows")
        return table

    def _aggregate(self, config: ExperimentConfig, rows: list[ResultRow], workloads) -> list[AggregateRow]:
        def median_of(policy: str, p: float) -> float:
            values = [row.mean_flow_time for row in rows if row.policy == policy and row.p == p and not row.failed]
            return statistics.median(values) if values else math.nan

        aggregates = []
        for p in config.p_values:
            if "hesrpt" in config.policies:
                reference = median_of("hesrpt", p)
            else:
                reference = statistics.median(
                    hesrpt_mean_flow_time(workloads[seed], p, config.n_servers) for seed in config.seeds
                )
            for policy in config.policies:
                median = median_of(policy, p)
                aggregates.append(
                    AggregateRow(
                        policy=policy,
                        p=p,
                        median_mean_flow_time=median,
                        ratio_to_hesrpt=median / reference,
                    )
                )

        policy_rank = {policy: index for index, policy in enumerate(config.policies)}
        aggregates.sort(key=lambda row: (policy_rank[row.policy], config.p_values.index(row.p)))
        return aggregates

    def emit(self, table: ResultTable, path: str) -> dict[str, str]:
        """
        Write raw rows, aggregates, and a policy-by-p ratio matrix for plotting
        into the directory `path`.

        Returns:
            dict: Artifact name to written file path.
        """
        directory = Path(path)
        written = {
            "raw": str(directory / RAW_FILE),
            "aggregate": str(directory / AGGREGATE_FILE),
            "plot": str(directory / PLOT_FILE),
        }
        try:
            directory.mkdir(parents=True, exist_ok=True)

            with open(written["raw"], "w", newline="", encoding="utf-8") as handle:
                writer = csv.writer(handle, lineterminator="\n")
                writer.writerow(RAW_HEADER)
                for row in table.rows:
                    writer.writerow(
                        [
                            row.policy,
                            repr(row.p),
                            row.seed,
                            _format(row.total_flow_time),
                            _format(row.mean_flow_time),
                            _format(row.makespan),
                        ]
                    )

            with open(written["aggregate"], "w", newline="", encoding="utf-8") as handle:
                writer = csv.writer(handle, lineterminator="\n")
                writer.writerow(AGGREGATE_HEADER)
                for row in table.aggregates:
                    writer.writerow(
                        [row.policy, repr(row.p), _format(row.median_mean_flow_time), _format(row.ratio_to_hesrpt)]
                    )

            ratios = {(row.policy, row.p): row.ratio_to_hesrpt for row in table.aggregates}
            with open(written["plot"], "w", newline="", encoding="utf-8") as handle:
                writer = csv.writer(handle, lineterminator="\n")
                writer.writerow(["policy"] + [f"p={p!r}" for p in table.p_values])
                for policy in table.policies:
                    writer.writerow(
                        [policy] + [_format(ratios.get((policy, p), math.nan)) for p in table.p_values]
                    )
        except OSError as exc:
            raise ExperimentIOException(str(directory), str(exc))

        self.logger.info(f"Wrote experiment artifacts to {directory}")
        return written
