from typing import List

from fastapi import APIRouter, Request
from fastapi.responses import JSONResponse
from fastapi.encoders import jsonable_encoder
from aws_lambda_powertools import Logger
from pydantic import BaseModel, Field

from api.decorators.exceptions_decorator import exceptions_decorator
from common.constants.defaults import DEFAULT_ORACLE_N_SERVERS, MAX_GRID_STEP
from common.constants.services import API_SERVICE
from common.helpers.oracle_helper import OracleHelper
from common.models.job import JobSet
from common.models.speedup import SpeedupFunction

logger = Logger(service=API_SERVICE)
router = APIRouter()


class GridSearchRequest(BaseModel):
    sizes: List[float] = Field(..., description="One to three job sizes")
    speedup: str = Field(..., description="power:p=<p> or amdahl:f=<f>")
    n_servers: float = Field(DEFAULT_ORACLE_N_SERVERS, description="Number of servers N")
    grid_step: float = Field(MAX_GRID_STEP, description="Grid resolution, at most 0.01")


@router.post("/grid_search", response_model=dict)
@exceptions_decorator
def grid_search(request: Request, body: GridSearchRequest):
    """
    Brute-force the best phase-constant allocation for a small instance.
    """
    logger.append_keys(run_id=request.state.run_id)
    logger.info(f"Request body: {body.model_dump()}")

    speedup = SpeedupFunction.from_spec(body.speedup)
    helper = OracleHelper(run_id=request.state.run_id)
    if len(body.sizes) == 2:
        x1, x2 = sorted(body.sizes, reverse=True)
        result = helper.grid_search_two_jobs(x1, x2, speedup, body.n_servers, body.grid_step)
    else:
        result = helper.grid_search_small(
            JobSet.from_sizes(body.sizes), speedup, body.n_servers, body.grid_step
        )

    return JSONResponse(status_code=200, content=jsonable_encoder(result))
