from typing import List

from fastapi import APIRouter, Request
from fastapi.responses import JSONResponse
from aws_lambda_powertools import Logger
from pydantic import BaseModel, Field

from api.decorators.exceptions_decorator import exceptions_decorator
from common.constants.services import API_SERVICE
from common.helpers.policy_helper import (
    helrpt_allocation,
    helrpt_makespan,
    hesrpt_allocation,
    hesrpt_mean_flow_time,
    hesrpt_total_flow_time,
    scale_free_constants,
)
from exceptions.simulator_exceptions import EmptyJobSetException

logger = Logger(service=API_SERVICE)
router = APIRouter()


class ClosedFormRequest(BaseModel):
    sizes: List[float] = Field(..., description="Job sizes in any order")
    p: float = Field(..., description="Speedup exponent, 0 < p < 1")
    n_servers: float = Field(..., description="Number of servers N")


@router.post("/closed_form", response_model=dict)
@exceptions_decorator
def closed_form(request: Request, body: ClosedFormRequest):
    """
    Optimal flow time and makespan without simulating.
    """
    logger.append_keys(run_id=request.state.run_id)
    logger.info(f"Request body: {body.model_dump()}")

    if not body.sizes:
        raise EmptyJobSetException()
    sizes = sorted(body.sizes, reverse=True)

    content = {
        "sizes": sizes,
        "hesrpt_total_flow_time": hesrpt_total_flow_time(sizes, body.p, body.n_servers),
        "hesrpt_mean_flow_time": hesrpt_mean_flow_time(sizes, body.p, body.n_servers),
        "hesrpt_allocation": hesrpt_allocation(len(sizes), body.p),
        "omega": list(scale_free_constants(len(sizes), body.p).omega),
        "helrpt_makespan": helrpt_makespan(sizes, body.p, body.n_servers),
        "helrpt_allocation": helrpt_allocation(sizes, body.p),
    }
    logger.info(f"Closed forms for {len(sizes)} jobs at p={body.p}")
    return JSONResponse(status_code=200, content=content)
