from functools import lru_cache
from typing import Mapping
import itertools
import math

from aws_lambda_powertools import Logger
import numpy as np

from common.constants.defaults import DEPARTURE_TOLERANCE, MAX_GRID_STEP, MAX_ORACLE_JOBS
from common.constants.services import SERVICE
from common.helpers.simulator_helper import (
    Policy,
    Simulator,
    allocation_for_state,
    policy_name,
)
from common.models.allocation import AllocationVector, SystemState
from common.models.job import JobSet
from common.models.oracle import GridSearchResult
from common.models.speedup import SpeedupFunction
from common.models.trajectory import Departure, Phase, Trajectory, TrajectoryTotals
from exceptions.oracle_exceptions import (
    UnsupportedOracleSizeException,
    InvalidGridStepException,
    InvalidOracleInstanceException,
)
from exceptions.policy_exceptions import InvalidPolicyInputException
from exceptions.simulator_exceptions import (
    EmptyJobSetException,
    LivelockException,
    PolicyContractViolationException,
)


class PhasePlanPolicy:
    """
    Replays a fixed plan: one allocation per set of active jobs. A lone job
    not in the plan gets the whole system.
    """

    name = "phase_plan"

    def __init__(self, plan: Mapping[frozenset, Mapping[int, float]]):
        self.plan = dict(plan)

    def __call__(self, state: SystemState) -> AllocationVector:
        shares = self.plan.get(frozenset(state.job_ids))
        if shares is None:
            if state.m == 1:
                return AllocationVector(job_ids=state.job_ids, thetas=(1.0,))
            raise PolicyContractViolationException(
                self.name, f"no planned allocation for jobs {sorted(state.job_ids)}", state.time
            )
        return AllocationVector.from_mapping({job_id: shares[job_id] for job_id in state.job_ids})


def _grid_points(grid_step: float) -> int:
    """Number of grid intervals in [0, 1]."""
    if not 0.0 < grid_step <= MAX_GRID_STEP:
        raise InvalidGridStepException(grid_step, MAX_GRID_STEP)
    return int(math.floor(1.0 / grid_step + 1e-9))


def _split_grid(grid_step: float) -> list[float]:
    n = _grid_points(grid_step)
    splits = [k / n if abs(n * grid_step - 1.0) < 1e-9 else k * grid_step for k in range(n + 1)]
    if splits[-1] < 1.0:
        splits.append(1.0)
    return splits


@lru_cache(maxsize=16)
def _simplex_grid(m: int, n: int) -> np.ndarray:
    """All allocations of m jobs with shares in multiples of 1/n summing to 1, lexicographic."""
    heads = [head for head in itertools.product(range(n + 1), repeat=m - 1) if sum(head) <= n]
    return np.array([list(head) + [n - sum(head)] for head in heads], dtype=float) / n


class OracleHelper:
    """
    Brute-force checks at small scale: grid search over phase-constant
    allocations, and an explicit Euler stepping run of any policy.
    """

    def __init__(self, run_id: str = None):
        self.logger = Logger(service=SERVICE)
        if run_id:
            self.logger.append_keys(run_id=run_id)
        self.simulator = Simulator(run_id=run_id)

    def grid_search_two_jobs(
        self,
        x1: float,
        x2: float,
        speedup: SpeedupFunction,
        n_servers: float,
        grid_step: float,
    ) -> GridSearchResult:
        """
        Search the first-phase split q in {0, step, ..., 1}, trying both jobs as
        the one receiving q; the survivor takes the full system afterwards.

        Args:
            x1, x2: Sizes with x1 >= x2 > 0 (job ids 0 and 1).
            speedup: Any speedup function.
            n_servers: N.
            grid_step: Step in (0, 0.01].

        Returns:
            GridSearchResult: best_split is the phase-1 share of the job that
            actually finishes first.
        """
        if not (x1 >= x2 > 0):
            raise InvalidOracleInstanceException(x1, x2)
        splits = _split_grid(grid_step)
        jobs = JobSet.from_sizes([x1, x2])
        both = frozenset((0, 1))

        best = None
        examined = 0
        for first, other in ((0, 1), (1, 0)):
            for q in splits:
                policy = PhasePlanPolicy({both: {first: q, other: 1.0 - q}})
                trajectory = self.simulator.run(policy, jobs, n_servers, speedup)
                examined += 1
                if best is None or trajectory.totals.total_flow_time < best.totals.total_flow_time:
                    best = trajectory

        result = self._result(best, grid_step, examined)
        first_finisher = best.completion_order[0]
        result.best_split = best.phases[0].allocation.share(first_finisher)
        self.logger.info(
            f"Two-job grid search ({speedup.label}, N={n_servers}): job {first_finisher} finishes "
            f"first with split {result.best_split}, total flow time {result.best_objective}"
        )
        return result

    def grid_search_small(
        self,
        jobs: JobSet,
        speedup: SpeedupFunction,
        n_servers: float,
        grid_step: float,
    ) -> GridSearchResult:
        """
        Exhaustive search over per-phase simplex grids for up to three jobs.

        Phase 1 ranges over every allocation of all jobs; whichever job that
        allocation finishes first fixes the completion order, and the survivors'
        phases are searched the same way, so every completion order is covered.
        The minimizer is replayed through the simulator.
        """
        if len(jobs) == 0:
            raise EmptyJobSetException()
        if len(jobs) > MAX_ORACLE_JOBS:
            raise UnsupportedOracleSizeException(len(jobs), MAX_ORACLE_JOBS)
        n = _grid_points(grid_step)

        ordered = jobs.descending()
        ids = tuple(job.job_id for job in ordered.jobs)
        sizes = np.array(ordered.sizes)
        tolerance = DEPARTURE_TOLERANCE * sizes
        system_rate = speedup.evaluate(float(n_servers))

        self._examined = 0
        cost, plan = self._best_plan(ids, sizes, tolerance, speedup, float(n_servers), system_rate, n)
        self.logger.debug(f"Grid search plan cost {cost}")

        policy = PhasePlanPolicy(
            {frozenset(plan_ids): dict(zip(plan_ids, thetas)) for plan_ids, thetas in plan}
        )
        trajectory = self.simulator.run(policy, jobs, n_servers, speedup)
        result = self._result(trajectory, grid_step, self._examined)
        self.logger.info(
            f"Grid search over {len(jobs)} jobs ({speedup.label}, N={n_servers}, step {grid_step}): "
            f"total flow time {result.best_objective}, completion order {result.completion_order}"
        )
        return result

    def _best_plan(self, ids, remaining, tolerance, speedup, n_servers, system_rate, n):
        m = len(ids)
        if m == 1:
            self._examined += 1
            return remaining[0] / system_rate, [(ids, (1.0,))]

        grid = _simplex_grid(m, n)
        rates = speedup.evaluate(grid * n_servers)
        with np.errstate(divide="ignore"):
            finish = np.where(rates > 0, remaining / np.where(rates > 0, rates, 1.0), np.inf)
        duration = finish.min(axis=1)
        left = remaining - rates * duration[:, None]
        done = (left <= tolerance) | (finish <= duration[:, None])
        phase_cost = m * duration

        if m == 2:
            # at most one survivor, who then runs alone at rate s(N)
            survivor = np.where(done, 0.0, left).sum(axis=1)
            totals = phase_cost + survivor / system_rate
            self._examined += len(grid)
            best = int(np.argmin(totals))
            plan = [(ids, tuple(grid[best].tolist()))]
            alive = [ids[j] for j in range(m) if not done[best, j]]
            if alive:
                plan.append((tuple(alive), (1.0,)))
            return float(totals[best]), plan

        best_cost, best_plan = math.inf, None
        for row in range(len(grid)):
            keep = np.flatnonzero(~done[row])
            if len(keep):
                sub_cost, sub_plan = self._best_plan(
                    tuple(ids[j] for j in keep),
                    left[row, keep],
                    tolerance[keep],
                    speedup,
                    n_servers,
                    system_rate,
                    n,
                )
            else:
                self._examined += 1
                sub_cost, sub_plan = 0.0, []
            total = phase_cost[row] + sub_cost
            if total < best_cost:
                best_cost = total
                best_plan = [(ids, tuple(grid[row].tolist()))] + sub_plan
        return float(best_cost), best_plan

    def _result(self, trajectory: Trajectory, grid_step: float, examined: int) -> GridSearchResult:
        return GridSearchResult(
            best_allocation_per_phase=[phase.allocation for phase in trajectory.phases],
            best_objective=trajectory.totals.total_flow_time,
            grid_step=grid_step,
            completion_order=trajectory.completion_order,
            candidates_examined=examined,
        )

    def stepping_verify(
        self,
        policy: Policy,
        jobs: JobSet,
        n_servers: float,
        speedup: SpeedupFunction,
        dt: float,
    ) -> Trajectory:
        """
        Explicit Euler run: x_i <- x_i - dt * s(theta_i N) every step, re-querying
        the policy after each departure. Completion times carry first-order
        error in dt.
        """
        if not dt > 0:
            raise InvalidPolicyInputException("dt", dt, "a positive real")
        if len(jobs) == 0:
            raise EmptyJobSetException()

        name = policy_name(policy)
        initial = jobs.size_by_id
        remaining = dict(initial)
        time = 0.0
        phases = []
        departures = []
        queries = 0

        while remaining:
            state = SystemState.from_sizes(remaining, n_servers, speedup, time=time)
            allocation = policy(state)
            queries += 1
            thetas = allocation_for_state(name, state, allocation)
            rates = [float(r) for r in np.atleast_1d(speedup.evaluate(thetas * n_servers))]
            if not any(r > 0 for r in rates):
                raise LivelockException(name, state)

            sizes = list(state.remaining)
            floors = [DEPARTURE_TOLERANCE * initial[job_id] for job_id in state.job_ids]
            steps = 0
            while True:
                steps += 1
                finished = False
                for i, rate in enumerate(rates):
                    sizes[i] -= dt * rate
                    if sizes[i] <= floors[i]:
                        finished = True
                if finished:
                    break
            end = time + steps * dt

            phases.append(
                Phase(
                    start=time,
                    end=end,
                    allocation=AllocationVector(
                        job_ids=state.job_ids, thetas=tuple(thetas.tolist())
                    ),
                    remaining_at_start=state.remaining,
                )
            )
            leaving = sorted(
                (state.job_ids[i] for i in range(state.m) if sizes[i] <= floors[i]),
                key=lambda job_id: (initial[job_id], job_id),
            )
            for job_id in leaving:
                departures.append(Departure(job_id=job_id, completion_time=end))
                del remaining[job_id]
            for i, job_id in enumerate(state.job_ids):
                if job_id in remaining:
                    remaining[job_id] = sizes[i]
            time = end

        completion_times = [departure.completion_time for departure in departures]
        total = math.fsum(completion_times)
        self.logger.info(f"Stepping run of {name} with dt={dt}: total flow time {total}")
        return Trajectory(
            policy=name,
            phases=phases,
            departures=departures,
            completion_order=[departure.job_id for departure in departures],
            totals=TrajectoryTotals(
                total_flow_time=total,
                mean_flow_time=total / len(completion_times),
                makespan=max(completion_times),
            ),
            policy_queries=queries,
        )
