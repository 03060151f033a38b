from starlette.middleware.base import BaseHTTPMiddleware
from aws_lambda_powertools import Logger
from common.constants.services import API_SERVICE
import uuid

RUN_ID_HEADER = "X-Run-Id"

logger = Logger(service=API_SERVICE)


class RunIdMiddleware(BaseHTTPMiddleware):
    async def dispatch(self, request, call_next):
        run_id = request.headers.get(RUN_ID_HEADER)
        context = request.scope.get("aws.context")
        if not run_id and context:
            run_id = getattr(context, "aws_request_id", None)
        if not run_id:
            run_id = str(uuid.uuid4())
            logger.debug("No run id supplied, generated one")
        logger.append_keys(run_id=run_id)
        request.state.run_id = run_id
        response = await call_next(request)
        response.headers[RUN_ID_HEADER] = run_id
        return response
