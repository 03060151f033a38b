from typing import List, Optional

from fastapi import APIRouter, Request
from fastapi.responses import JSONResponse
from aws_lambda_powertools import Logger
from pydantic import BaseModel, Field

from api.decorators.exceptions_decorator import exceptions_decorator
from common.constants.services import API_SERVICE
from common.helpers.speedup_helper import SpeedupHelper
from common.models.speedup import MeasuredCurve

logger = Logger(service=API_SERVICE)
router = APIRouter()


class MeasuredPoint(BaseModel):
    cores: float
    speedup: float


class FitRequest(BaseModel):
    points: List[MeasuredPoint] = Field(..., description="Measurements, cores ascending")
    base_cores: Optional[float] = Field(
        None, description="Re-normalize the curve to this measurement first"
    )


@router.post("/fit", response_model=dict)
@exceptions_decorator
def fit_curve(request: Request, body: FitRequest):
    """
    Fit s(k) = k^p to a measured speedup curve.
    """
    logger.append_keys(run_id=request.state.run_id)
    logger.info(f"Fitting {len(body.points)} points")

    curve = MeasuredCurve.from_pairs((point.cores, point.speedup) for point in body.points)
    if body.base_cores is not None:
        curve = curve.renormalized(body.base_cores)
    result = SpeedupHelper(run_id=request.state.run_id).fit_power_law(curve)

    return JSONResponse(
        status_code=200,
        content={
            "p": result.speedup.p,
            "raw_p": result.raw_p,
            "clamped": result.clamped,
            "residual_sum_squares": result.residual_sum_squares,
            "n_points": result.n_points,
        },
    )
