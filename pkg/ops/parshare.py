import sys
import os

# Add the project root to sys.path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from functools import wraps
import argparse
import json

from aws_lambda_powertools import Logger

from common.constants.defaults import (
    DEFAULT_BASE_SEED,
    DEFAULT_N_JOBS,
    DEFAULT_N_SEEDS,
    DEFAULT_N_SERVERS,
    DEFAULT_ORACLE_N_SERVERS,
    DEFAULT_OUTPUT_PATH,
    DEFAULT_P_VALUES,
    DEFAULT_PARETO_SCALE,
    DEFAULT_PARETO_SHAPE,
    DEFAULT_WORKERS,
)
from common.constants.services import CLI_SERVICE
from common.helpers.experiment_helper import ExperimentHelper, load_sizes, parse_distribution
from common.helpers.oracle_helper import OracleHelper
from common.helpers.policy_helper import build_policy
from common.helpers.simulator_helper import Simulator, export_trajectory
from common.helpers.speedup_helper import SpeedupHelper
from common.models.experiment import ExperimentConfig
from common.models.job import JobSet
from common.models.speedup import SpeedupFunction
from exceptions.experiment_exceptions import (
    DistributionSpecParseException,
    ExperimentIOException,
    InvalidExperimentConfigException,
    SizesFileException,
)
from exceptions.oracle_exceptions import (
    InvalidGridStepException,
    InvalidOracleInstanceException,
    UnsupportedOracleSizeException,
)
from exceptions.policy_exceptions import (
    InvalidAllocationException,
    InvalidGranularityException,
    InvalidPolicyInputException,
    InvalidStateException,
    UnknownPolicyException,
    UnsortedSizesException,
    UnsupportedSpeedupException,
)
from exceptions.simulator_exceptions import SimulatorException
from exceptions.speedup_exceptions import (
    DegenerateCurveException,
    InvalidCurveException,
    InvalidServerCountException,
    InvalidSpeedupException,
    SpeedupSpecParseException,
)

logger = Logger(service=CLI_SERVICE)

EXIT_INVALID_INPUT = 2
EXIT_SIMULATION_FAILURE = 3
EXIT_IO_FAILURE = 4

INVALID_INPUT = (
    InvalidSpeedupException,
    InvalidServerCountException,
    SpeedupSpecParseException,
    InvalidCurveException,
    DegenerateCurveException,
    InvalidPolicyInputException,
    InvalidAllocationException,
    InvalidGranularityException,
    InvalidStateException,
    UnknownPolicyException,
    UnsortedSizesException,
    UnsupportedSpeedupException,
    InvalidExperimentConfigException,
    DistributionSpecParseException,
    SizesFileException,
    InvalidGridStepException,
    InvalidOracleInstanceException,
    UnsupportedOracleSizeException,
)


def exit_on_error(func):
    """Turn domain exceptions into a message on stderr and a non-zero exit code."""

    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except INVALID_INPUT as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INVALID_INPUT
        except SimulatorException as exc:
            print(f"simulation failed: {exc}", file=sys.stderr)
            return EXIT_SIMULATION_FAILURE
        except ExperimentIOException as exc:
            print(f"i/o failure: {exc}", file=sys.stderr)
            return EXIT_IO_FAILURE

    return wrapper


def _floats(text: str) -> list[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{text}' is not a comma-separated list of numbers")


def _names(text: str) -> list[str]:
    return [item.strip().lower() for item in text.split(",") if item.strip()]


@exit_on_error
def bench(args) -> int:
    shape, scale = parse_distribution(args.dist)
    config = ExperimentConfig(
        n_servers=args.n_servers,
        n_jobs=args.jobs,
        p_values=args.p,
        pareto_shape=shape,
        pareto_scale=scale,
        n_seeds=args.seeds,
        base_seed=args.base_seed,
        policies=args.policies,
        knee_alpha_grid=args.knee_alphas,
        hell_granularity=args.hell_granularity,
        knee_granularity=args.knee_granularity,
        output_path=args.out,
        workers=args.workers,
    )
    helper = ExperimentHelper(run_id="bench")
    table = helper.run_matrix(config)
    written = helper.emit(table, config.output_path)

    for row in table.aggregates:
        print(f"{row.policy:>7} p={row.p:<5} median mean flow time {row.median_mean_flow_time:.6g}  ratio {row.ratio_to_hesrpt:.4f}")
    print(f"Wrote {written['raw']}, {written['aggregate']}, {written['plot']}")
    return 0


@exit_on_error
def trace(args) -> int:
    sizes = load_sizes(args.sizes_file)
    speedup = SpeedupFunction.power_law(args.p)
    policy = build_policy(args.policy, alpha=args.alpha, granularity=args.granularity)
    trajectory = Simulator(run_id="trace").run(policy, JobSet.from_sizes(sizes), args.n_servers, speedup)
    export_trajectory(trajectory, args.out)

    print(
        f"{policy.name}: {len(trajectory.phases)} phases, total flow time "
        f"{trajectory.totals.total_flow_time:.10g}, makespan {trajectory.totals.makespan:.10g}"
    )
    print(f"Wrote {args.out}")
    return 0


@exit_on_error
def fit(args) -> int:
    helper = SpeedupHelper(run_id="fit")
    result = helper.fit_power_law(helper.load_curve(args.curve))
    print(f"p={result.speedup.p:.6f}")
    if result.clamped:
        print(f"warning: least-squares slope {result.raw_p} was clamped into (0, 1)", file=sys.stderr)
    return 0


@exit_on_error
def oracle(args) -> int:
    speedup = SpeedupFunction.from_spec(args.speedup)
    helper = OracleHelper(run_id="oracle")
    if len(args.sizes) == 2:
        x1, x2 = sorted(args.sizes, reverse=True)
        result = helper.grid_search_two_jobs(x1, x2, speedup, args.n_servers, args.grid_step)
    else:
        result = helper.grid_search_small(JobSet.from_sizes(args.sizes), speedup, args.n_servers, args.grid_step)
    print(json.dumps(result.model_dump(), indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parshare", description="Divide N servers among M parallelizable jobs."
    )
    subparsers = parser.add_subparsers(dest="command", required=True, help="Command to execute.")

    # Policy sweep over seeded Pareto workloads
    bench_parser = subparsers.add_parser("bench", help="Compare policies across p values.")
    bench_parser.add_argument("--n-servers", type=float, default=DEFAULT_N_SERVERS, help="Number of servers N.")
    bench_parser.add_argument("--jobs", type=int, default=DEFAULT_N_JOBS, help="Number of jobs M.")
    bench_parser.add_argument(
        "--p", type=_floats, default=list(DEFAULT_P_VALUES), help="Comma-separated speedup exponents."
    )
    bench_parser.add_argument(
        "--dist",
        default=f"pareto:shape={DEFAULT_PARETO_SHAPE},scale={DEFAULT_PARETO_SCALE}",
        help="Job-size distribution, e.g. pareto:shape=1.5,scale=1.",
    )
    bench_parser.add_argument("--seeds", type=int, default=DEFAULT_N_SEEDS, help="Number of workloads.")
    bench_parser.add_argument("--base-seed", type=int, default=DEFAULT_BASE_SEED, help="Seed of the first workload.")
    bench_parser.add_argument(
        "--policies", type=_names, default=["hesrpt", "srpt", "equi", "hell", "knee"], help="Comma-separated policies."
    )
    bench_parser.add_argument("--knee-alphas", type=_floats, default=None, help="KNEE thresholds to sweep.")
    bench_parser.add_argument("--hell-granularity", type=int, default=None, help="HELL grain count G.")
    bench_parser.add_argument("--knee-granularity", type=int, default=None, help="KNEE grain count G.")
    bench_parser.add_argument("--workers", type=int, default=DEFAULT_WORKERS, help="Worker processes.")
    bench_parser.add_argument("--out", default=DEFAULT_OUTPUT_PATH, help="Output directory.")
    bench_parser.set_defaults(handler=bench)

    # Per-phase trajectory of one policy
    trace_parser = subparsers.add_parser("trace", help="Write the per-phase trajectory of one policy.")
    trace_parser.add_argument("--policy", required=True, help="hesrpt, helrpt, srpt, equi, hell or knee.")
    trace_parser.add_argument("--sizes-file", required=True, help="CSV with header 'size'.")
    trace_parser.add_argument("--p", type=float, required=True, help="Speedup exponent.")
    trace_parser.add_argument("--n-servers", type=float, required=True, help="Number of servers N.")
    trace_parser.add_argument("--alpha", type=float, default=None, help="KNEE threshold.")
    trace_parser.add_argument("--granularity", type=int, default=None, help="HELL/KNEE grain count.")
    trace_parser.add_argument("--out", required=True, help="Trajectory CSV path.")
    trace_parser.set_defaults(handler=trace)

    # Power-law fit to a measured curve
    fit_parser = subparsers.add_parser("fit", help="Fit s(k) = k^p to a measured speedup curve.")
    fit_parser.add_argument("--curve", required=True, help="CSV with header 'cores,speedup'.")
    fit_parser.set_defaults(handler=fit)

    # Brute-force check on two or three jobs
    oracle_parser = subparsers.add_parser("oracle", help="Grid-search the optimal split for up to three jobs.")
    oracle_parser.add_argument("--sizes", type=_floats, required=True, help="Comma-separated job sizes.")
    oracle_parser.add_argument("--speedup", required=True, help="power:p=<p> or amdahl:f=<f>.")
    oracle_parser.add_argument("--grid-step", type=float, default=0.005, help="Grid resolution.")
    oracle_parser.add_argument(
        "--n-servers", type=float, default=DEFAULT_ORACLE_N_SERVERS, help="Number of servers N."
    )
    oracle_parser.set_defaults(handler=oracle)

    return parser


def main(argv=None) -> int:
    """
    Parse arguments and dispatch to the chosen command.
    """
    args = build_parser().parse_args(argv)
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
