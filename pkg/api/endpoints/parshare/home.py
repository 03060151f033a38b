from fastapi import APIRouter
from fastapi.responses import JSONResponse
from aws_lambda_powertools import Logger

from common.constants.defaults import POLICY_NAMES
from common.constants.services import API_SERVICE

logger = Logger(service=API_SERVICE)

router = APIRouter()


@router.get(path="/", summary="Home Endpoint", response_description="Welcome message")
async def home():
    """
    Home Endpoint

    Returns:
        A welcome message and the policies the API can run.
    """
    logger.info("Called home endpoint.")
    return JSONResponse(
        content={"message": "Welcome to the Parshare API", "policies": list(POLICY_NAMES)},
        status_code=200,
    )
