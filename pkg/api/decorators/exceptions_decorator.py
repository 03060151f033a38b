from functools import wraps

from fastapi.responses import JSONResponse

from exceptions.experiment_exceptions import (
    DistributionSpecParseException,
    ExperimentIOException,
    InvalidExperimentConfigException,
    SizesFileException,
)
from exceptions.oracle_exceptions import (
    InvalidGridStepException,
    InvalidOracleInstanceException,
    UnsupportedOracleSizeException,
)
from exceptions.policy_exceptions import (
    InvalidAllocationException,
    InvalidGranularityException,
    InvalidPolicyInputException,
    InvalidStateException,
    UnknownPolicyException,
    UnsortedSizesException,
    UnsupportedSpeedupException,
)
from exceptions.simulator_exceptions import (
    EmptyJobSetException,
    InvalidJobSetException,
    InvalidScaleException,
    LivelockException,
    PolicyContractViolationException,
)
from exceptions.speedup_exceptions import (
    DegenerateCurveException,
    InvalidCurveException,
    InvalidServerCountException,
    InvalidSpeedupException,
    SpeedupSpecParseException,
)


def exceptions_decorator(func):
    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)

        # 4XX
        except UnknownPolicyException as exc:
            return JSONResponse(
                content={"message": str(exc), "policy": exc.name, "allowed": list(exc.allowed or [])},
                status_code=400,
            )
        except (
            InvalidSpeedupException,
            SpeedupSpecParseException,
            InvalidServerCountException,
            InvalidCurveException,
            DegenerateCurveException,
            InvalidPolicyInputException,
            InvalidAllocationException,
            InvalidGranularityException,
            InvalidStateException,
            UnsortedSizesException,
            EmptyJobSetException,
            InvalidJobSetException,
            InvalidScaleException,
            InvalidGridStepException,
            InvalidOracleInstanceException,
            InvalidExperimentConfigException,
            DistributionSpecParseException,
            SizesFileException,
        ) as exc:
            return JSONResponse(
                content={"message": str(exc) or "Invalid request data."},
                status_code=400,
            )
        except UnsupportedSpeedupException as exc:
            return JSONResponse(
                content={"message": str(exc), "speedup": exc.kind},
                status_code=422,
            )
        except UnsupportedOracleSizeException as exc:
            return JSONResponse(
                content={
                    "message": str(exc),
                    "n_jobs": exc.n_jobs,
                    "max_jobs": exc.max_jobs,
                },
                status_code=422,
            )
        except LivelockException as exc:
            return JSONResponse(
                content={
                    "message": str(exc),
                    "policy": exc.policy,
                    "time": exc.state.time,
                    "job_ids": list(exc.state.job_ids),
                },
                status_code=409,
            )
        except PolicyContractViolationException as exc:
            return JSONResponse(
                content={"message": str(exc), "policy": exc.policy, "time": exc.time},
                status_code=409,
            )

        ### 5XX
        except ExperimentIOException as exc:
            return JSONResponse(
                content={"message": str(exc) or "Internal server error.", "path": exc.path},
                status_code=500,
            )

    return wrapper
