from typing import List, Optional

from fastapi import APIRouter, Request
from fastapi.responses import JSONResponse
from fastapi.encoders import jsonable_encoder
from aws_lambda_powertools import Logger
from pydantic import BaseModel, Field

from api.decorators.exceptions_decorator import exceptions_decorator
from common.constants.services import API_SERVICE
from common.helpers.policy_helper import build_policy
from common.helpers.simulator_helper import Simulator
from common.models.job import JobSet
from common.models.speedup import SpeedupFunction

logger = Logger(service=API_SERVICE)
router = APIRouter()


class SimulationRequest(BaseModel):
    policy: str = Field(..., description="hesrpt, helrpt, srpt, equi, hell or knee")
    sizes: List[float] = Field(..., description="Initial sizes; job i has id i")
    n_servers: float = Field(..., description="Number of servers N")
    speedup: str = Field(..., description="power:p=<p> or amdahl:f=<f>")
    alpha: Optional[float] = Field(None, description="KNEE threshold")
    granularity: Optional[int] = Field(None, description="HELL/KNEE grain count")
    beta: float = Field(0.0, description="Fraction of the system left unused")
    record_phases: bool = Field(True, description="Include the per-phase trajectory")


@router.post("/run", response_model=dict)
@exceptions_decorator
def run_simulation(request: Request, body: SimulationRequest):
    """
    Simulate a policy to completion and return its trajectory.
    """
    run_id = request.state.run_id
    logger.append_keys(run_id=run_id)
    logger.info(f"Simulating {body.policy} on {len(body.sizes)} jobs")

    policy = build_policy(body.policy, alpha=body.alpha, granularity=body.granularity)
    speedup = SpeedupFunction.from_spec(body.speedup)
    jobs = JobSet.from_sizes(body.sizes)
    simulator = Simulator(run_id=run_id)

    if body.beta:
        trajectory = simulator.scaled_run(
            policy, jobs, body.n_servers, speedup, body.beta, record_phases=body.record_phases
        )
    else:
        trajectory = simulator.run(
            policy, jobs, body.n_servers, speedup, record_phases=body.record_phases
        )

    logger.info(f"{policy.name} total flow time {trajectory.totals.total_flow_time}")
    return JSONResponse(status_code=200, content=jsonable_encoder(trajectory))
