from typing import Iterable

from pydantic import BaseModel, ConfigDict, field_validator

from exceptions.simulator_exceptions import InvalidJobSetException


class Job(BaseModel):
    model_config = ConfigDict(frozen=True)

    job_id: int
    size: float  # inherent size x_i

    @field_validator("size")
    def validate_size(cls, v):
        if not v > 0 or v == float("inf"):
            raise InvalidJobSetException(f"job size must be positive and finite, got {v}")
        return v


class JobSet(BaseModel):
    """The M jobs present at time 0."""

    model_config = ConfigDict(frozen=True)

    jobs: tuple[Job, ...]

    @field_validator("jobs")
    def validate_unique_ids(cls, v):
        ids = [job.job_id for job in v]
        if len(set(ids)) != len(ids):
            raise InvalidJobSetException(f"job ids must be unique, got {ids}")
        return v

    @classmethod
    def from_sizes(cls, sizes: Iterable[float], first_id: int = 0) -> "JobSet":
        """Build a job set numbering jobs first_id, first_id + 1, ... in the given order."""
        return cls(
            jobs=tuple(
                Job(job_id=first_id + index, size=size) for index, size in enumerate(sizes)
            )
        )

    def __len__(self) -> int:
        return len(self.jobs)

    @property
    def sizes(self) -> list[float]:
        return [job.size for job in self.jobs]

    @property
    def size_by_id(self) -> dict[int, float]:
        return {job.job_id: job.size for job in self.jobs}

    def descending(self) -> "JobSet":
        """Canonical order: largest first, ties by ascending job id."""
        return JobSet(jobs=tuple(sorted(self.jobs, key=lambda job: (-job.size, job.job_id))))
