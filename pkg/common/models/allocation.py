from typing import Mapping
import math

from pydantic import BaseModel, ConfigDict, model_validator

from common.models.speedup import SpeedupFunction
from exceptions.policy_exceptions import (
    InvalidStateException,
    InvalidAllocationException,
    InvalidPolicyInputException,
)


class SystemState(BaseModel):
    """
    Remaining jobs at time t, largest remaining size first (ties by ascending
    job id). Completed jobs are removed, never zeroed, so m(t) = len(job_ids).
    """

    model_config = ConfigDict(frozen=True)

    time: float = 0.0
    job_ids: tuple[int, ...]
    remaining: tuple[float, ...]
    n_servers: float
    speedup: SpeedupFunction

    @model_validator(mode="after")
    def validate_state(self):
        if not self.time >= 0:
            raise InvalidStateException(f"time must be nonnegative, got {self.time}")
        if not self.n_servers > 0:
            raise InvalidStateException(f"n_servers must be positive, got {self.n_servers}")
        if len(self.job_ids) != len(self.remaining):
            raise InvalidStateException("job_ids and remaining differ in length")
        if len(set(self.job_ids)) != len(self.job_ids):
            raise InvalidStateException("job ids repeat")

        for job_id, size in zip(self.job_ids, self.remaining):
            if not size > 0:
                raise InvalidStateException(f"job {job_id} has remaining size {size}")

        for (id_a, x_a), (id_b, x_b) in zip(
            zip(self.job_ids, self.remaining), zip(self.job_ids[1:], self.remaining[1:])
        ):
            if x_a < x_b or (x_a == x_b and id_a > id_b):
                raise InvalidStateException(
                    f"job {id_a} ({x_a}) must not precede job {id_b} ({x_b})"
                )
        return self

    @classmethod
    def from_sizes(
        cls,
        sizes: Mapping[int, float],
        n_servers: float,
        speedup: SpeedupFunction,
        time: float = 0.0,
    ) -> "SystemState":
        """Build a state from job_id -> remaining size, putting it in canonical order."""
        ordered = sorted(sizes.items(), key=lambda item: (-item[1], item[0]))
        return cls(
            time=time,
            job_ids=tuple(job_id for job_id, _ in ordered),
            remaining=tuple(size for _, size in ordered),
            n_servers=n_servers,
            speedup=speedup,
        )

    @property
    def m(self) -> int:
        return len(self.job_ids)

    def ascending_indices(self) -> list[int]:
        """Positions ordered by (remaining size, job id), smallest job first."""
        return sorted(range(self.m), key=lambda i: (self.remaining[i], self.job_ids[i]))


class AllocationVector(BaseModel):
    """Fractions of the server pool per active job, aligned with job_ids."""

    model_config = ConfigDict(frozen=True)

    job_ids: tuple[int, ...]
    thetas: tuple[float, ...]

    @model_validator(mode="after")
    def validate_thetas(self):
        if len(self.job_ids) != len(self.thetas):
            raise InvalidAllocationException(reason="job_ids and thetas differ in length")
        for job_id, theta in zip(self.job_ids, self.thetas):
            if not 0.0 <= theta <= 1.0:
                raise InvalidAllocationException(job_id, theta)
        return self

    @classmethod
    def from_mapping(cls, shares: Mapping[int, float]) -> "AllocationVector":
        return cls(job_ids=tuple(shares.keys()), thetas=tuple(shares.values()))

    @property
    def fractions(self) -> list[tuple[int, float]]:
        return list(zip(self.job_ids, self.thetas))

    @property
    def total(self) -> float:
        return math.fsum(self.thetas)

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.job_ids, self.thetas))

    def share(self, job_id: int) -> float:
        return self.as_dict()[job_id]


class ScaleFreeConstants(BaseModel):
    """
    omega_1 .. omega_M; omega_1 = 0 and the sequence strictly increases, except
    for a leading run of zeros where omega_k underflows (p close to 1).
    """

    model_config = ConfigDict(frozen=True)

    omega: tuple[float, ...]

    @model_validator(mode="after")
    def validate_omega(self):
        if not self.omega or self.omega[0] != 0.0:
            raise InvalidPolicyInputException("omega_1", self.omega[:1], "0")
        for k, (a, b) in enumerate(zip(self.omega, self.omega[1:]), start=1):
            if b < a or (b == a and a > 0.0):
                raise InvalidPolicyInputException(
                    f"omega_{k + 1}", b, f"greater than omega_{k}={a}"
                )
        return self
