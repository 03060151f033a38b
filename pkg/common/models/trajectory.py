from typing import Optional

from pydantic import BaseModel

from common.models.allocation import AllocationVector


class Phase(BaseModel):
    """Maximal interval between departures; the allocation is constant within it."""

    start: float
    end: float
    allocation: AllocationVector
    remaining_at_start: tuple[float, ...]  # aligned with allocation.job_ids


class Departure(BaseModel):
    job_id: int
    completion_time: float


class TrajectoryTotals(BaseModel):
    total_flow_time: float
    mean_flow_time: float
    makespan: float


class Trajectory(BaseModel):
    policy: str
    phases: list[Phase]
    departures: list[Departure]
    completion_order: list[int]
    totals: TrajectoryTotals
    policy_queries: int
    beta: Optional[float] = None  # unused fraction for scaled runs

    @property
    def completion_times(self) -> dict[int, float]:
        return {departure.job_id: departure.completion_time for departure in self.departures}
