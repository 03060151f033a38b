import os

STAGE = os.getenv("STAGE", "dev").lower()
METRICS_NAMESPACE = f"Parshare-{STAGE.upper()}"

POLICY_DIMENSION = "Policy"

# Simulator
SIMULATION_RUN = "SimulationRun"

# Experiments
EXPERIMENT_CELL_COMPLETED = "ExperimentCellCompleted"
EXPERIMENT_CELL_FAILED = "ExperimentCellFailed"
