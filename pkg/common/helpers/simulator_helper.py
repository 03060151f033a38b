from typing import Callable
import csv
import math
import os

from aws_lambda_powertools import Logger
import numpy as np

from common.constants.defaults import ALLOCATION_SUM_SLACK, DEPARTURE_TOLERANCE
from common.constants.services import SERVICE
from common.models.allocation import AllocationVector, SystemState
from common.models.job import JobSet
from common.models.speedup import SpeedupFunction
from common.models.trajectory import Departure, Phase, Trajectory, TrajectoryTotals
from exceptions.experiment_exceptions import ExperimentIOException
from exceptions.simulator_exceptions import (
    EmptyJobSetException,
    InvalidScaleException,
    LivelockException,
    PolicyContractViolationException,
)

Policy = Callable[[SystemState], AllocationVector]


def policy_name(policy: Policy) -> str:
    return getattr(policy, "name", None) or getattr(
        policy, "__name__", type(policy).__name__
    )


def allocation_for_state(
    name: str, state: SystemState, allocation: AllocationVector
) -> np.ndarray:
    """
    Check a policy's answer against the state it was asked about and return the
    shares in state order.
    """
    if not isinstance(allocation, AllocationVector):
        raise PolicyContractViolationException(
            name, f"returned {type(allocation).__name__}, not an AllocationVector", state.time
        )
    if len(allocation.job_ids) != state.m or set(allocation.job_ids) != set(state.job_ids):
        raise PolicyContractViolationException(
            name,
            f"covers jobs {sorted(allocation.job_ids)}, active jobs are {sorted(state.job_ids)}",
            state.time,
        )
    if allocation.total > 1.0 + ALLOCATION_SUM_SLACK:
        raise PolicyContractViolationException(
            name, f"shares sum to {allocation.total}", state.time
        )

    if allocation.job_ids == state.job_ids:
        return np.array(allocation.thetas, dtype=float)
    shares = allocation.as_dict()
    return np.array([shares[job_id] for job_id in state.job_ids], dtype=float)


class Simulator:
    """
    Departure-driven execution of an allocation policy.

    The policy is queried once per phase. Within a phase every active job
    depletes at the constant rate s(theta * N), so the next departure time is
    found algebraically rather than by stepping.
    """

    def __init__(self, run_id: str = None):
        self.logger = Logger(service=SERVICE)
        if run_id:
            self.logger.append_keys(run_id=run_id)

    def run(
        self,
        policy: Policy,
        jobs: JobSet,
        n_servers: float,
        speedup: SpeedupFunction,
        record_phases: bool = True,
    ) -> Trajectory:
        return self._execute(policy, jobs, n_servers, speedup, 1.0, record_phases)

    def scaled_run(
        self,
        policy: Policy,
        jobs: JobSet,
        n_servers: float,
        speedup: SpeedupFunction,
        beta: float,
        record_phases: bool = True,
    ) -> Trajectory:
        """
        Run with every allocation multiplied by (1 - beta), leaving a fraction
        beta of the system unused.
        """
        if not 0.0 <= beta < 1.0:
            raise InvalidScaleException(beta)
        trajectory = self._execute(
            policy, jobs, n_servers, speedup, 1.0 - beta, record_phases
        )
        trajectory.beta = beta
        return trajectory

    def _execute(
        self,
        policy: Policy,
        jobs: JobSet,
        n_servers: float,
        speedup: SpeedupFunction,
        scale: float,
        record_phases: bool,
    ) -> Trajectory:
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
            if scale != 1.0:
                thetas = thetas * scale

            sizes = np.array(state.remaining)
            rates = np.asarray(speedup.evaluate(thetas * n_servers))
            if not np.any(rates > 0):
                self.logger.error(f"Policy {name} starved every job at t={time}")
                raise LivelockException(name, state)

            with np.errstate(divide="ignore"):
                finish = np.where(rates > 0, sizes / np.where(rates > 0, rates, 1.0), np.inf)
            duration = float(finish.min())
            left = sizes - rates * duration
            tolerance = DEPARTURE_TOLERANCE * np.array([initial[job_id] for job_id in state.job_ids])
            done = (left <= tolerance) | (finish <= duration)
            end = time + duration

            if record_phases:
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
                (state.job_ids[i] for i in np.flatnonzero(done)),
                key=lambda job_id: (initial[job_id], job_id),
            )
            for job_id in leaving:
                departures.append(Departure(job_id=job_id, completion_time=end))
                del remaining[job_id]
            for i in np.flatnonzero(~done):
                remaining[state.job_ids[i]] = float(left[i])

            self.logger.debug(
                f"Phase [{time}, {end}] under {name}: {len(leaving)} departed, {len(remaining)} remain"
            )
            time = end

        completion_times = [departure.completion_time for departure in departures]
        total = math.fsum(completion_times)
        totals = TrajectoryTotals(
            total_flow_time=total,
            mean_flow_time=total / len(completion_times),
            makespan=max(completion_times),
        )
        self.logger.debug(
            f"Simulated {name} on {len(jobs)} jobs: total flow time {total}, "
            f"makespan {totals.makespan}, {queries} phases"
        )

        return Trajectory(
            policy=name,
            phases=phases,
            departures=departures,
            completion_order=[departure.job_id for departure in departures],
            totals=totals,
            policy_queries=queries,
        )


def export_trajectory(trajectory: Trajectory, path: str) -> None:
    """
    Write one row per job per phase:
    phase_start,phase_end,job_id,theta,remaining_at_start
    """
    try:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["phase_start", "phase_end", "job_id", "theta", "remaining_at_start"])
            for phase in trajectory.phases:
                for job_id, theta, size in zip(
                    phase.allocation.job_ids, phase.allocation.thetas, phase.remaining_at_start
                ):
                    writer.writerow([repr(phase.start), repr(phase.end), job_id, repr(theta), repr(size)])
    except OSError as exc:
        raise ExperimentIOException(path, str(exc))
