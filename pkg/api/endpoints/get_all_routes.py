from fastapi import FastAPI

from api.endpoints.parshare import home
from api.endpoints.policy import allocate, closed_form
from api.endpoints.simulation import run_simulation
from api.endpoints.speedup import fit_curve
from api.endpoints.oracle import grid_search
from common.constants.tags import HOME, ORACLE, POLICY, SIMULATION, SPEEDUP


def get_all_routes(app: FastAPI) -> FastAPI:
    """
    Registers all API routes with the FastAPI application.

    Args:
        app (FastAPI): The FastAPI application instance.

    Returns:
        FastAPI: The updated FastAPI application instance with all routes registered.
    """
    app.include_router(home.router, prefix="/parshare", tags=[HOME])

    app.include_router(allocate.router, prefix="/policy", tags=[POLICY])
    app.include_router(closed_form.router, prefix="/policy", tags=[POLICY])

    app.include_router(run_simulation.router, prefix="/simulation", tags=[SIMULATION])

    app.include_router(fit_curve.router, prefix="/speedup", tags=[SPEEDUP])

    app.include_router(grid_search.router, prefix="/oracle", tags=[ORACLE])

    return app
