from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from mangum import Mangum
from aws_lambda_powertools import Logger
from middleware.run_id_middleware import RunIdMiddleware
from api.endpoints.get_all_routes import get_all_routes
from common.constants.services import API_SERVICE
import os

logger = Logger(service=API_SERVICE)
app = FastAPI(
    title="Parshare API",
    description="Allocate servers among parallelizable jobs and compare scheduling policies.",
    version="1.0.0",
    docs_url="/docs",
    redoc_url="/redoc",
)


allowed_origins = [
    origin.strip()
    for origin in os.getenv("ALLOWED_ORIGINS", "*").split(",")
    if origin.strip()
]

app.add_middleware(RunIdMiddleware)
app.add_middleware(
    CORSMiddleware,
    allow_origins=allowed_origins,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app = get_all_routes(app)

handler = Mangum(app)
