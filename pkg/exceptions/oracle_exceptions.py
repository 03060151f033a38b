class UnsupportedOracleSizeException(Exception):
    """Exception raised when the brute-force search is asked for too many jobs."""

    def __init__(self, n_jobs: int = None, max_jobs: int = None):
        if n_jobs is not None and max_jobs is not None:
            message = f"Grid search supports at most {max_jobs} jobs, got {n_jobs}."
        else:
            message = "Grid search instance is too large."

        self.n_jobs = n_jobs
        self.max_jobs = max_jobs
        self.message = message
        super().__init__(self.message)


class InvalidGridStepException(Exception):
    """Exception raised when the grid step is outside (0, max_step]."""

    def __init__(self, grid_step: float = None, max_step: float = None):
        if grid_step is not None and max_step is not None:
            message = f"Grid step {grid_step} must satisfy 0 < step <= {max_step}."
        else:
            message = "Invalid grid step."

        self.grid_step = grid_step
        self.max_step = max_step
        self.message = message
        super().__init__(self.message)


class InvalidOracleInstanceException(Exception):
    """Exception raised when the two-job search gets sizes out of order."""

    def __init__(self, x1: float = None, x2: float = None):
        if x1 is not None and x2 is not None:
            message = f"Two-job search needs x1 >= x2 > 0, got x1={x1}, x2={x2}."
        else:
            message = "Invalid two-job instance."

        self.x1 = x1
        self.x2 = x2
        self.message = message
        super().__init__(self.message)
