import os

# Default benchmark setup
DEFAULT_N_SERVERS = 1_000_000
DEFAULT_N_JOBS = 500
DEFAULT_P_VALUES = (0.05, 0.3, 0.5, 0.9, 0.99)
DEFAULT_PARETO_SHAPE = 1.5
DEFAULT_PARETO_SCALE = 1.0
DEFAULT_N_SEEDS = 10
DEFAULT_BASE_SEED = int(os.getenv("PARSHARE_BASE_SEED", "42"))
DEFAULT_WORKERS = int(os.getenv("PARSHARE_WORKERS", "1"))
DEFAULT_OUTPUT_PATH = os.getenv("PARSHARE_OUTPUT_PATH", "results")

# KNEE alpha sweep, spans [low, high] * pareto_scale, log-spaced
KNEE_ALPHA_LOW = 1e-6
KNEE_ALPHA_HIGH = 1e3
KNEE_ALPHA_POINTS = 40

# Grain pool for HELL / KNEE
MAX_GRANULARITY = 1_000_000

# Tolerances
DEPARTURE_TOLERANCE = 1e-12  # relative to initial job size
ALLOCATION_SUM_SLACK = 1e-9  # simulator contract
FIT_CLAMP = 1e-6
CURVE_NORMALIZATION_TOLERANCE = 1e-6

# Oracle
MAX_ORACLE_JOBS = 3
MAX_GRID_STEP = 0.01
DEFAULT_ORACLE_N_SERVERS = 10.0

POLICY_NAMES = ("hesrpt", "helrpt", "srpt", "equi", "hell", "knee")
