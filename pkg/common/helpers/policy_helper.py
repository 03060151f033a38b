"""
Allocation policies for M parallelizable jobs sharing N divisible servers.

Closed forms (power-law speedup s(k) = k^p only):
    heSRPT  optimal total flow time, shares depend only on the rank and m(t)
    heLRPT  optimal makespan, shares proportional to x_i^(1/p)

Competitors: SRPT, EQUI, and the grain-based HELL and KNEE heuristics.

Ranks follow the descending convention: rank 1 is the largest remaining job.
"""

from functools import lru_cache
from typing import ClassVar, Iterable, Optional, Sequence
import math

from aws_lambda_powertools import Logger
import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from common.constants.defaults import MAX_GRANULARITY
from common.constants.services import SERVICE
from common.helpers.simulator_helper import Simulator
from common.models.allocation import AllocationVector, ScaleFreeConstants, SystemState
from common.models.job import JobSet
from common.models.speedup import SpeedupFunction
from common.models.trajectory import Trajectory
from exceptions.policy_exceptions import (
    InvalidPolicyInputException,
    UnsortedSizesException,
    UnsupportedSpeedupException,
    InvalidGranularityException,
    UnknownPolicyException,
)

logger = Logger(service=SERVICE)


def _check_exponent(p: float) -> float:
    if isinstance(p, bool) or not isinstance(p, (int, float)) or not 0.0 < p < 1.0:
        raise InvalidPolicyInputException("p", p, "a real strictly between 0 and 1")
    return float(p)


def _check_count(name: str, value: int) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
        raise InvalidPolicyInputException(name, value, "a positive integer")
    return int(value)


def _check_sizes(sizes: Sequence[float], descending: bool) -> list[float]:
    values = [float(x) for x in sizes]
    if not values:
        raise InvalidPolicyInputException("sizes", values, "at least one job")
    for x in values:
        if not x > 0 or math.isinf(x):
            raise InvalidPolicyInputException("size", x, "a positive finite real")
    if descending:
        for index in range(len(values) - 1):
            if values[index] < values[index + 1]:
                raise UnsortedSizesException(index, values)
    return values


def _power_law_exponent(speedup: SpeedupFunction, operation: str) -> float:
    if not speedup.is_power_law:
        raise UnsupportedSpeedupException(speedup.kind.value, operation)
    return speedup.p


def hesrpt_allocation(m: int, p: float) -> list[float]:
    """
    heSRPT shares for m remaining jobs, rank 1 (largest) to rank m (smallest):
    theta_i = (i/m)^c - ((i-1)/m)^c with c = 1/(1-p).

    Shares of the largest ranks may underflow to 0 when c is large; the last
    share is 1 - ((m-1)/m)^c so the vector still sums to 1.
    """
    m = _check_count("m", m)
    p = _check_exponent(p)
    c = 1.0 / (1.0 - p)

    cumulative = np.power(np.arange(m + 1, dtype=float) / m, c)
    fractions = np.diff(cumulative)
    fractions[-1] = 1.0 - cumulative[m - 1]
    return fractions.tolist()


def scale_free_constants(M: int, p: float) -> ScaleFreeConstants:
    """
    omega_1 = 0, omega_k = 1 / ((k/(k-1))^(1/(1-p)) - 1) for k >= 2.

    Evaluated as x / (1 - x) with x = ((k-1)/k)^c, which underflows to 0 for
    p near 1 instead of overflowing.
    """
    M = _check_count("M", M)
    p = _check_exponent(p)
    c = 1.0 / (1.0 - p)

    omega = [0.0]
    for k in range(2, M + 1):
        log_x = c * math.log1p(-1.0 / k)
        omega.append(math.exp(log_x) / -math.expm1(log_x))
    return ScaleFreeConstants(omega=tuple(omega))


def flow_time_coefficient(k: int, p: float) -> float:
    """Delta(k) = k * s(1 + omega_k) - (k - 1) * s(omega_k)."""
    k = _check_count("k", k)
    p = _check_exponent(p)
    omega = scale_free_constants(k, p).omega[-1]
    return k * (1.0 + omega) ** p - (k - 1) * omega**p


def flow_time_coefficient_closed(k: int, p: float) -> float:
    """Delta(k) = (k^c - (k-1)^c)^(1-p), evaluated as k * (1 - (1 - 1/k)^c)^(1-p)."""
    k = _check_count("k", k)
    p = _check_exponent(p)
    c = 1.0 / (1.0 - p)
    if k == 1:
        return 1.0
    return k * (-math.expm1(c * math.log1p(-1.0 / k))) ** (1.0 - p)


def flow_time_for_scale_free_constants(
    sizes: Sequence[float], omegas: Sequence[float], p: float, n_servers: float
) -> float:
    """
    Total flow time of a phase-constant policy with scale-free constants omegas.

    sizes[k-1] is the job completing k-th from last, so the last job to finish
    comes first.
    """
    values = _check_sizes(sizes, descending=False)
    p = _check_exponent(p)
    if len(omegas) != len(values):
        raise InvalidPolicyInputException("omegas", list(omegas), f"{len(values)} constants")
    if omegas[0] != 0.0 or any(w < 0 for w in omegas):
        raise InvalidPolicyInputException("omegas", list(omegas), "omega_1 = 0 and all omega >= 0")
    if not n_servers > 0:
        raise InvalidPolicyInputException("n_servers", n_servers, "a positive real")

    terms = [
        x * (k * (1.0 + w) ** p - (k - 1) * w**p)
        for k, (x, w) in enumerate(zip(values, omegas), start=1)
    ]
    return math.fsum(terms) / n_servers**p


def hesrpt_total_flow_time(sizes: Sequence[float], p: float, n_servers: float) -> float:
    """
    Closed-form total flow time of heSRPT.

    Args:
        sizes: Job sizes sorted descending (x_1 >= ... >= x_M). Not re-sorted.
        p: Power-law exponent in (0, 1).
        n_servers: N.

    Returns:
        float: (1/s(N)) * sum_k x_k * [k s(1 + omega_k) - (k - 1) s(omega_k)].
    """
    values = _check_sizes(sizes, descending=True)
    omegas = scale_free_constants(len(values), p).omega
    return flow_time_for_scale_free_constants(values, omegas, p, n_servers)


def hesrpt_mean_flow_time(sizes: Sequence[float], p: float, n_servers: float) -> float:
    return hesrpt_total_flow_time(sizes, p, n_servers) / len(sizes)


def helrpt_allocation(sizes: Sequence[float], p: float) -> list[float]:
    """
    heLRPT shares gamma_i = x_i^(1/p) / sum_j x_j^(1/p), in the order given.
    The shares stay constant until every job completes at the same instant.
    """
    values = np.array(_check_sizes(sizes, descending=False))
    p = _check_exponent(p)
    weights = np.power(values / values.max(), 1.0 / p)
    return (weights / weights.sum()).tolist()


def helrpt_makespan(sizes: Sequence[float], p: float, n_servers: float) -> float:
    """(sum_j x_j^(1/p))^p / s(N): the 1/p-norm of the sizes at system rate N^p."""
    values = np.array(_check_sizes(sizes, descending=False))
    p = _check_exponent(p)
    if not n_servers > 0:
        raise InvalidPolicyInputException("n_servers", n_servers, "a positive real")
    largest = float(values.max())
    norm = largest * math.fsum(np.power(values / largest, 1.0 / p).tolist()) ** p
    return norm / n_servers**p


def srpt_allocation(state: SystemState) -> AllocationVector:
    """Whole system to the smallest remaining job (ties: smallest job id)."""
    chosen = min(range(state.m), key=lambda i: (state.remaining[i], state.job_ids[i]))
    thetas = [0.0] * state.m
    thetas[chosen] = 1.0
    return AllocationVector(job_ids=state.job_ids, thetas=tuple(thetas))


def equi_allocation(state: SystemState) -> AllocationVector:
    share = 1.0 / state.m
    return AllocationVector(job_ids=state.job_ids, thetas=(share,) * state.m)


def default_granularity(n_servers: float) -> int:
    """One grain per server when N is integral and at most 10^6, else 10^6 grains."""
    if float(n_servers).is_integer() and 1 <= n_servers <= MAX_GRANULARITY:
        return int(n_servers)
    return MAX_GRANULARITY


def _grains_to_allocation(state: SystemState, grains: list[int], granularity: int) -> AllocationVector:
    return AllocationVector(
        job_ids=state.job_ids, thetas=tuple(g / granularity for g in grains)
    )


def _spread_leftover(grains: list[int], pool: int, ascending: list[int]) -> None:
    """Hand out leftover grains one at a time, round-robin, smallest job first."""
    if pool <= 0:
        return
    base, extra = divmod(pool, len(ascending))
    for rank, index in enumerate(ascending):
        grains[index] += base + (1 if rank < extra else 0)


@lru_cache(maxsize=8)
def _hell_best_grains(speedup: SpeedupFunction, n_servers: float, granularity: int) -> np.ndarray:
    """
    best[pool - 1] = smallest g in 1..pool maximizing s(u)^2 / u, u = g N / G.
    """
    grain = n_servers / granularity
    servers = np.arange(1, granularity + 1, dtype=float) * grain
    score = np.square(speedup.evaluate(servers)) / servers

    previous_max = np.concatenate(([-np.inf], np.maximum.accumulate(score)[:-1]))
    record = np.where(score > previous_max, np.arange(granularity), 0)
    return np.maximum.accumulate(record) + 1


def _hell_grains_for_pool(speedup: SpeedupFunction, n_servers: float, granularity: int, pool: int) -> int:
    if speedup.is_power_law:
        # s(u)^2 / u = u^(2p - 1): decreasing or flat for p <= 1/2, increasing above
        return 1 if 2.0 * speedup.p - 1.0 <= 0.0 else pool
    return int(_hell_best_grains(speedup, float(n_servers), granularity)[pool - 1])


def hell_allocation(state: SystemState, granularity: int) -> AllocationVector:
    """
    HELL over G equal grains of the pool.

    Each round picks the (job, grain count) pair with the highest ratio of
    efficiency s(u)/u to remaining processing time x_i/s(u), u = g N / G
    (ties: fewer grains, then smaller job id), awards it, and drops the job
    from candidacy. Grains left once every job has been awarded go round-robin
    to jobs in ascending remaining size.

    The ratio factors as [s(u)^2 / u] / x_i, so the winner of every round is
    the smallest remaining candidate and its award depends only on the pool.
    """
    granularity = _check_count("granularity", granularity)
    if granularity < state.m:
        raise InvalidGranularityException(granularity, state.m)

    ascending = state.ascending_indices()
    grains = [0] * state.m
    pool = granularity
    for index in ascending:
        if pool == 0:
            break
        award = _hell_grains_for_pool(state.speedup, state.n_servers, granularity, pool)
        grains[index] = award
        pool -= award

    _spread_leftover(grains, pool, ascending)
    return _grains_to_allocation(state, grains, granularity)


@lru_cache(maxsize=8)
def _knee_negated_marginals(speedup: SpeedupFunction, n_servers: float, granularity: int) -> np.ndarray:
    """
    -phi(g) for g = 1..G, where x * phi(g) is the run-time saved by the
    (g+1)-th grain. phi is non-increasing for concave s; the running minimum
    removes floating-point wobble so the negation is sorted.
    """
    grain = n_servers / granularity
    servers = np.arange(1, granularity + 2, dtype=float) * grain
    inverse_rates = 1.0 / speedup.evaluate(servers)
    marginals = np.minimum.accumulate(inverse_rates[:-1] - inverse_rates[1:])
    return -marginals


def knee_grains(sizes: Sequence[float], alpha: float, speedup: SpeedupFunction, n_servers: float, granularity: int) -> np.ndarray:
    """
    Knee allocation per job: smallest g with x/s(gN/G) - x/s((g+1)N/G) < alpha,
    or G when no grain count up to G gets there.
    """
    negated = _knee_negated_marginals(speedup, float(n_servers), granularity)
    thresholds = -alpha / np.asarray(sizes, dtype=float)
    first = np.searchsorted(negated, thresholds, side="right")
    return np.minimum(first + 1, granularity)


def knee_allocation(state: SystemState, alpha: float, granularity: int) -> AllocationVector:
    """
    KNEE over G equal grains. Each round the candidate with the smallest knee
    capped at the pool (ties: smaller job id) gets min(knee, pool) grains and
    leaves candidacy. Leftover grains go round-robin in ascending remaining size.
    """
    if isinstance(alpha, bool) or not alpha > 0:
        raise InvalidPolicyInputException("alpha", alpha, "a positive real")
    granularity = _check_count("granularity", granularity)

    knees = knee_grains(state.remaining, alpha, state.speedup, state.n_servers, granularity)
    order = sorted(range(state.m), key=lambda i: (int(knees[i]), state.job_ids[i]))
    grains = [0] * state.m
    pool = granularity
    for rank, index in enumerate(order):
        if pool == 0:
            break
        if knees[index] >= pool:
            # every remaining knee caps to the pool
            index = min(order[rank:], key=lambda i: state.job_ids[i])
            grains[index] = pool
            pool = 0
            break
        grains[index] = int(knees[index])
        pool -= grains[index]

    _spread_leftover(grains, pool, state.ascending_indices())
    return _grains_to_allocation(state, grains, granularity)


class AllocationPolicy(BaseModel):
    """A pure rule SystemState -> AllocationVector."""

    model_config = ConfigDict(frozen=True)

    name: ClassVar[str] = "policy"

    def __call__(self, state: SystemState) -> AllocationVector:
        raise NotImplementedError


class HeSRPTPolicy(AllocationPolicy):
    name: ClassVar[str] = "hesrpt"

    def __call__(self, state: SystemState) -> AllocationVector:
        p = _power_law_exponent(state.speedup, "heSRPT")
        return AllocationVector(job_ids=state.job_ids, thetas=tuple(hesrpt_allocation(state.m, p)))


class HeLRPTPolicy(AllocationPolicy):
    name: ClassVar[str] = "helrpt"

    def __call__(self, state: SystemState) -> AllocationVector:
        p = _power_law_exponent(state.speedup, "heLRPT")
        return AllocationVector(
            job_ids=state.job_ids, thetas=tuple(helrpt_allocation(state.remaining, p))
        )


class SRPTPolicy(AllocationPolicy):
    name: ClassVar[str] = "srpt"

    def __call__(self, state: SystemState) -> AllocationVector:
        return srpt_allocation(state)


class EquiPolicy(AllocationPolicy):
    name: ClassVar[str] = "equi"

    def __call__(self, state: SystemState) -> AllocationVector:
        return equi_allocation(state)


class _GrainPolicy(AllocationPolicy):
    granularity: Optional[int] = None

    @field_validator("granularity")
    def validate_granularity(cls, v):
        if v is not None and v < 1:
            raise InvalidGranularityException(v)
        return v

    def grains(self, state: SystemState) -> int:
        return self.granularity or default_granularity(state.n_servers)


class HellPolicy(_GrainPolicy):
    name: ClassVar[str] = "hell"

    def __call__(self, state: SystemState) -> AllocationVector:
        return hell_allocation(state, self.grains(state))


class KneePolicy(_GrainPolicy):
    name: ClassVar[str] = "knee"

    alpha: float

    @field_validator("alpha")
    def validate_alpha(cls, v):
        if not v > 0:
            raise InvalidPolicyInputException("alpha", v, "a positive real")
        return v

    def __call__(self, state: SystemState) -> AllocationVector:
        return knee_allocation(state, self.alpha, self.grains(state))


POLICIES = {
    policy.name: policy
    for policy in (HeSRPTPolicy, HeLRPTPolicy, SRPTPolicy, EquiPolicy, HellPolicy, KneePolicy)
}


def build_policy(name: str, **params) -> AllocationPolicy:
    """
    Instantiate a registered policy; parameters the policy does not take
    (or that are None) are ignored.
    """
    policy_class = POLICIES.get(name.lower())
    if policy_class is None:
        raise UnknownPolicyException(name, list(POLICIES))
    accepted = {
        key: value
        for key, value in params.items()
        if key in policy_class.model_fields and value is not None
    }
    for key, field in policy_class.model_fields.items():
        if field.is_required() and key not in accepted:
            raise InvalidPolicyInputException(key, None, f"a value for the {policy_class.name} policy")
    return policy_class(**accepted)


def knee_alpha_sweep(
    jobs: JobSet,
    p: float,
    n_servers: float,
    granularity: Optional[int],
    alpha_grid: Iterable[float],
    run_id: str = None,
) -> tuple[float, Trajectory]:
    """
    Brute-force the KNEE threshold: simulate every alpha in the grid and keep
    the one with the smallest total flow time (ties: smaller alpha).

    Returns:
        tuple: (best_alpha, trajectory of the best run, phases not recorded)
    """
    alphas = sorted(float(alpha) for alpha in alpha_grid)
    if not alphas:
        raise InvalidPolicyInputException("alpha_grid", alphas, "at least one alpha")

    speedup = SpeedupFunction.power_law(_check_exponent(p))
    simulator = Simulator(run_id=run_id)

    best_alpha, best = None, None
    for alpha in alphas:
        policy = KneePolicy(alpha=alpha, granularity=granularity)
        trajectory = simulator.run(policy, jobs, n_servers, speedup, record_phases=False)
        if best is None or trajectory.totals.total_flow_time < best.totals.total_flow_time:
            best_alpha, best = alpha, trajectory

    logger.info(
        f"KNEE alpha search over {len(alphas)} values: best alpha {best_alpha}, "
        f"total flow time {best.totals.total_flow_time}"
    )
    return best_alpha, best


def knee_alpha_search(
    jobs: JobSet,
    p: float,
    n_servers: float,
    granularity: Optional[int],
    alpha_grid: Iterable[float],
    run_id: str = None,
) -> tuple[float, float]:
    """
    Returns:
        tuple: (best_alpha, best_total_flow_time)
    """
    best_alpha, trajectory = knee_alpha_sweep(jobs, p, n_servers, granularity, alpha_grid, run_id=run_id)
    return best_alpha, trajectory.totals.total_flow_time
