class SimulatorException(Exception):
    """Base exception for simulator errors."""

    pass


class EmptyJobSetException(SimulatorException):
    """Raised when a run is requested without any jobs."""

    def __init__(self):
        super().__init__("Cannot simulate an empty job set")


class InvalidJobSetException(SimulatorException):
    """Raised when job ids repeat or a size is not positive."""

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(f"Invalid job set: {reason}")


class InvalidScaleException(SimulatorException):
    """Raised when the unused fraction beta is outside [0, 1)."""

    def __init__(self, beta: float):
        self.beta = beta
        super().__init__(f"Unused fraction beta={beta} must satisfy 0 <= beta < 1")


class LivelockException(SimulatorException):
    """Raised when a policy grants nothing to any remaining job."""

    def __init__(self, policy: str, state):
        self.policy = policy
        self.state = state
        super().__init__(
            f"Policy {policy} starves all {len(state.job_ids)} remaining jobs "
            f"at t={state.time}: {dict(zip(state.job_ids, state.remaining))}"
        )


class PolicyContractViolationException(SimulatorException):
    """Raised when a policy returns a vector the simulator cannot execute."""

    def __init__(self, policy: str, reason: str, time: float = None):
        self.policy = policy
        self.reason = reason
        self.time = time
        super().__init__(f"Policy {policy} violated its contract at t={time}: {reason}")
