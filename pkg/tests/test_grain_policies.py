import numpy as np
import pytest
from pytest import approx

from common.helpers.policy_helper import (
    HellPolicy,
    KneePolicy,
    default_granularity,
    hell_allocation,
    hesrpt_total_flow_time,
    knee_alpha_search,
    knee_alpha_sweep,
    knee_allocation,
    knee_grains,
)
from common.helpers.simulator_helper import Simulator
from common.models.allocation import SystemState
from common.models.job import JobSet
from common.models.speedup import SpeedupFunction
from exceptions.policy_exceptions import InvalidGranularityException, InvalidPolicyInputException

SQRT = SpeedupFunction.power_law(0.5)


def state_of(sizes, n_servers, speedup=SQRT):
    return SystemState.from_sizes(dict(enumerate(sizes)), n_servers, speedup)


def test_default_granularity():
    assert default_granularity(64) == 64
    assert default_granularity(1_000_000) == 1_000_000
    assert default_granularity(2.5) == 1_000_000
    assert default_granularity(5e7) == 1_000_000


def test_hell_flat_ratio_gives_one_grain_each_then_round_robin():
    allocation = hell_allocation(state_of([2.0, 1.0], n_servers=4), granularity=4)
    assert allocation.as_dict() == {0: 0.5, 1: 0.5}


@pytest.mark.parametrize("granularity", [1, 7, 100])
def test_hell_single_job_gets_everything(granularity):
    assert hell_allocation(state_of([3.0], n_servers=10), granularity).thetas == (1.0,)


def test_hell_steep_speedup_hands_the_pool_to_the_smallest_job():
    state = state_of([3.0, 1.0, 2.0], n_servers=10, speedup=SpeedupFunction.power_law(0.9))
    assert hell_allocation(state, granularity=10).as_dict() == {0: 0.0, 1: 1.0, 2: 0.0}


def test_hell_amdahl_stops_at_the_efficiency_peak():
    # s(u)^2 / u peaks at u = f / (1 - f) = 9 servers
    state = state_of([5.0, 3.0, 1.0], n_servers=16, speedup=SpeedupFunction.amdahl(0.9))
    allocation = hell_allocation(state, granularity=16)
    assert allocation.as_dict() == approx({0: 0.0, 1: 7 / 16, 2: 9 / 16})


def test_hell_round_robin_prefers_smaller_jobs():
    allocation = hell_allocation(state_of([3.0, 2.0, 1.0], n_servers=10), granularity=10)
    # one grain each, then 7 leftover: 3, 2, 2 smallest first
    assert allocation.as_dict() == approx({0: 0.3, 1: 0.3, 2: 0.4})


def test_hell_needs_a_grain_per_job():
    with pytest.raises(InvalidGranularityException):
        hell_allocation(state_of([3.0, 2.0, 1.0], n_servers=10), granularity=2)
    with pytest.raises(InvalidGranularityException):
        HellPolicy(granularity=0)


def test_knee_of_a_unit_job():
    # marginal gains 0.293, 0.130, 0.077: the third falls below 0.1
    assert knee_grains([1.0], 0.1, SQRT, 10.0, 10).tolist() == [3]


def test_knee_with_huge_alpha_is_one_grain():
    assert knee_grains([1.0, 2.0, 3.0], 1e9, SQRT, 10.0, 10).tolist() == [1, 1, 1]
    allocation = knee_allocation(state_of([3.0, 2.0, 1.0], n_servers=10), 1e9, 10)
    assert allocation.as_dict() == approx({0: 0.3, 1: 0.3, 2: 0.4})


def test_knee_with_tiny_alpha_hands_the_pool_to_one_job():
    assert knee_grains([1.0, 3.0], 1e-12, SQRT, 10.0, 10).tolist() == [10, 10]
    # equal knees: the smaller job id takes the whole pool
    allocation = knee_allocation(state_of([3.0, 1.0, 2.0], n_servers=10), 1e-12, 10)
    assert allocation.as_dict() == {0: 1.0, 1: 0.0, 2: 0.0}


def test_knee_grains_match_a_direct_scan():
    sizes = np.array([0.5, 2.0, 40.0])
    n_servers, granularity, alpha = 100.0, 50, 0.3
    grain = n_servers / granularity
    for size, knee in zip(sizes, knee_grains(sizes, alpha, SQRT, n_servers, granularity)):
        expected = granularity
        for g in range(1, granularity + 1):
            gain = size / SQRT.evaluate(g * grain) - size / SQRT.evaluate((g + 1) * grain)
            if gain < alpha:
                expected = g
                break
        assert knee == expected


def test_knee_caps_awards_at_the_pool():
    # every knee exceeds the pool, so the smallest job id takes all of it
    state = state_of([40.0, 30.0, 20.0], n_servers=10)
    assert knee_allocation(state, 0.05, 10).as_dict() == {0: 1.0, 1: 0.0, 2: 0.0}


def test_knee_ties_go_to_the_smaller_job_id_not_the_smaller_job():
    # both knees are 3 grains
    state = SystemState.from_sizes({0: 1.01, 1: 1.0}, 4.0, SQRT)
    assert knee_grains(state.remaining, 0.1, SQRT, 4.0, 4).tolist() == [3, 3]
    assert knee_allocation(state, 0.1, 4).as_dict() == approx({0: 0.75, 1: 0.25})


def test_knee_capped_candidates_are_ordered_by_job_id():
    # knees 4, 3, 2: job 2 takes 2 grains, then jobs 0 and 1 both cap to the 2 left
    state = state_of([1.5, 1.0, 0.5], n_servers=4)
    assert knee_grains([1.5, 1.0, 0.5], 0.1, SQRT, 4.0, 4).tolist() == [4, 3, 2]
    assert knee_allocation(state, 0.1, 4).as_dict() == approx({0: 0.5, 1: 0.0, 2: 0.5})


def test_knee_rejects_non_positive_alpha():
    with pytest.raises(InvalidPolicyInputException):
        knee_allocation(state_of([1.0], n_servers=10), 0.0, 10)
    with pytest.raises(InvalidPolicyInputException):
        KneePolicy(alpha=-2.0)


def test_knee_alpha_search_single_alpha():
    jobs = JobSet.from_sizes([4.0, 2.0, 1.0])
    alpha, total = knee_alpha_search(jobs, 0.5, 10.0, None, [0.2])
    assert alpha == 0.2
    expected = Simulator().run(KneePolicy(alpha=0.2), jobs, 10.0, SQRT).totals.total_flow_time
    assert total == approx(expected)


def test_knee_alpha_search_prefers_smaller_alpha_on_ties():
    jobs = JobSet.from_sizes([1.0, 1.0])
    alpha, _ = knee_alpha_search(jobs, 0.5, 10.0, None, [1e6, 1e5])
    assert alpha == 1e5


def test_knee_alpha_search_beats_both_endpoints_and_not_hesrpt():
    jobs = JobSet.from_sizes([1.0, 1.0])
    grid = np.logspace(-3, 3, 25).tolist()
    alpha, total = knee_alpha_search(jobs, 0.5, 10.0, None, grid)
    simulator = Simulator()
    for endpoint in (grid[0], grid[-1]):
        endpoint_total = simulator.run(KneePolicy(alpha=endpoint), jobs, 10.0, SQRT).totals.total_flow_time
        assert total <= endpoint_total
    assert total >= hesrpt_total_flow_time([1.0, 1.0], 0.5, 10.0) - 1e-9
    assert alpha in grid


def test_knee_alpha_sweep_returns_the_winning_run():
    jobs = JobSet.from_sizes([4.0, 2.0, 1.0])
    grid = [0.01, 0.2, 5.0]
    alpha, trajectory = knee_alpha_sweep(jobs, 0.5, 10.0, None, grid)
    assert (alpha, trajectory.totals.total_flow_time) == knee_alpha_search(jobs, 0.5, 10.0, None, grid)
    assert trajectory.phases == []
    assert len(trajectory.departures) == 3


def test_knee_alpha_search_needs_a_grid():
    with pytest.raises(InvalidPolicyInputException):
        knee_alpha_search(JobSet.from_sizes([1.0]), 0.5, 10.0, None, [])
