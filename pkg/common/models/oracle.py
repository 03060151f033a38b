from typing import Optional

from pydantic import BaseModel

from common.models.allocation import AllocationVector


class GridSearchResult(BaseModel):
    """Best phase-constant policy found on a grid, replayed through the simulator."""

    best_allocation_per_phase: list[AllocationVector]
    best_objective: float  # total flow time
    grid_step: float
    completion_order: list[int]
    candidates_examined: int
    best_split: Optional[float] = None  # two-job search: first finisher's phase-1 share
