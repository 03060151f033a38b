from typing import List, Optional

from fastapi import APIRouter, Request
from fastapi.responses import JSONResponse
from aws_lambda_powertools import Logger
from pydantic import BaseModel, Field

from api.decorators.exceptions_decorator import exceptions_decorator
from common.constants.services import API_SERVICE
from common.helpers.policy_helper import build_policy
from common.models.allocation import SystemState
from common.models.speedup import SpeedupFunction

logger = Logger(service=API_SERVICE)
router = APIRouter()


class AllocateRequest(BaseModel):
    policy: str = Field(..., description="hesrpt, helrpt, srpt, equi, hell or knee")
    sizes: List[float] = Field(..., description="Remaining sizes; job i has id i")
    n_servers: float = Field(..., description="Number of servers N")
    speedup: str = Field(..., description="power:p=<p> or amdahl:f=<f>")
    alpha: Optional[float] = Field(None, description="KNEE threshold")
    granularity: Optional[int] = Field(None, description="HELL/KNEE grain count")


@router.post("/allocate", response_model=dict)
@exceptions_decorator
def allocate(request: Request, body: AllocateRequest):
    """
    Ask a policy for the allocation it makes in the given state.
    """
    logger.append_keys(run_id=request.state.run_id)
    logger.info(f"Request body: {body.model_dump()}")

    policy = build_policy(body.policy, alpha=body.alpha, granularity=body.granularity)
    state = SystemState.from_sizes(
        dict(enumerate(body.sizes)), body.n_servers, SpeedupFunction.from_spec(body.speedup)
    )
    allocation = policy(state)

    logger.info(f"{policy.name} allocation over {state.m} jobs sums to {allocation.total}")
    return JSONResponse(
        status_code=200,
        content={
            "policy": policy.name,
            "allocation": [
                {"job_id": job_id, "theta": theta} for job_id, theta in allocation.fractions
            ],
            "total": allocation.total,
        },
    )
