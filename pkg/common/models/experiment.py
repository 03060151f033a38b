from typing import Optional

import numpy as np
from pydantic import BaseModel, field_validator, model_validator

from common.constants.defaults import (
    DEFAULT_BASE_SEED,
    DEFAULT_N_JOBS,
    DEFAULT_N_SEEDS,
    DEFAULT_N_SERVERS,
    DEFAULT_OUTPUT_PATH,
    DEFAULT_P_VALUES,
    DEFAULT_PARETO_SCALE,
    DEFAULT_PARETO_SHAPE,
    DEFAULT_WORKERS,
    KNEE_ALPHA_HIGH,
    KNEE_ALPHA_LOW,
    KNEE_ALPHA_POINTS,
    POLICY_NAMES,
)
from exceptions.experiment_exceptions import InvalidExperimentConfigException


class ExperimentConfig(BaseModel):
    """One policy-by-p sweep over seeded Pareto workloads."""

    n_servers: float = DEFAULT_N_SERVERS
    n_jobs: int = DEFAULT_N_JOBS
    p_values: list[float] = list(DEFAULT_P_VALUES)
    pareto_shape: float = DEFAULT_PARETO_SHAPE
    pareto_scale: float = DEFAULT_PARETO_SCALE
    n_seeds: int = DEFAULT_N_SEEDS
    base_seed: int = DEFAULT_BASE_SEED
    policies: list[str] = ["hesrpt", "srpt", "equi", "hell", "knee"]
    knee_alpha_grid: Optional[list[float]] = None  # filled from pareto_scale when omitted
    hell_granularity: Optional[int] = None
    knee_granularity: Optional[int] = None
    output_path: str = DEFAULT_OUTPUT_PATH
    workers: int = DEFAULT_WORKERS

    @field_validator("n_servers", "pareto_shape", "pareto_scale")
    def validate_positive_real(cls, v, info):
        if not v > 0:
            raise InvalidExperimentConfigException(info.field_name, v, "must be positive")
        return v

    @field_validator("n_jobs", "n_seeds", "workers")
    def validate_positive_count(cls, v, info):
        if v < 1:
            raise InvalidExperimentConfigException(info.field_name, v, "must be at least 1")
        return v

    @field_validator("hell_granularity", "knee_granularity")
    def validate_granularity(cls, v, info):
        if v is not None and v < 1:
            raise InvalidExperimentConfigException(info.field_name, v, "must be at least 1")
        return v

    @field_validator("p_values")
    def validate_p_values(cls, v):
        if not v:
            raise InvalidExperimentConfigException("p_values", v, "need at least one value")
        for p in v:
            if not 0.0 < p < 1.0:
                raise InvalidExperimentConfigException("p_values", v, f"{p} is outside (0, 1)")
        if len(set(v)) != len(v):
            raise InvalidExperimentConfigException("p_values", v, "values repeat")
        return v

    @field_validator("policies")
    def validate_policies(cls, v):
        names = [name.lower() for name in v]
        if not names:
            raise InvalidExperimentConfigException("policies", v, "need at least one policy")
        for name in names:
            if name not in POLICY_NAMES:
                raise InvalidExperimentConfigException(
                    "policies", v, f"'{name}' is not one of {', '.join(POLICY_NAMES)}"
                )
        if len(set(names)) != len(names):
            raise InvalidExperimentConfigException("policies", v, "names repeat")
        return names

    @field_validator("knee_alpha_grid")
    def validate_alpha_grid(cls, v):
        if v is not None and (not v or any(not alpha > 0 for alpha in v)):
            raise InvalidExperimentConfigException(
                "knee_alpha_grid", v, "need at least one positive alpha"
            )
        return v

    @model_validator(mode="after")
    def fill_alpha_grid(self):
        if self.knee_alpha_grid is None:
            self.knee_alpha_grid = default_alpha_grid(self.pareto_scale)
        return self

    @property
    def seeds(self) -> list[int]:
        return [self.base_seed + index for index in range(self.n_seeds)]


def default_alpha_grid(scale: float) -> list[float]:
    """40 log-spaced thresholds spanning [1e-6, 1e3] * scale."""
    return (
        np.logspace(np.log10(KNEE_ALPHA_LOW), np.log10(KNEE_ALPHA_HIGH), KNEE_ALPHA_POINTS) * scale
    ).tolist()


class ResultRow(BaseModel):
    policy: str
    p: float
    seed: int
    total_flow_time: float
    mean_flow_time: float
    makespan: float
    failed: bool = False
    knee_alpha: Optional[float] = None  # best threshold found for KNEE cells


class AggregateRow(BaseModel):
    policy: str
    p: float
    median_mean_flow_time: float
    ratio_to_hesrpt: float


class ResultTable(BaseModel):
    policies: list[str] = []
    p_values: list[float] = []
    rows: list[ResultRow] = []
    aggregates: list[AggregateRow] = []
