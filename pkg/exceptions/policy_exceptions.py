class InvalidPolicyInputException(Exception):
    """Exception raised when a policy or closed form receives an out-of-domain argument."""

    def __init__(self, parameter: str = None, value=None, expected: str = None):
        if parameter and expected:
            message = f"Invalid {parameter}={value}: expected {expected}."
        elif parameter:
            message = f"Invalid {parameter}={value}."
        else:
            message = "Invalid policy input."

        self.parameter = parameter
        self.value = value
        self.expected = expected
        self.message = message
        super().__init__(self.message)


class UnsortedSizesException(Exception):
    """Exception raised when sizes are not in descending (largest-first) order."""

    def __init__(self, index: int = None, sizes: list = None):
        if index is not None and sizes is not None:
            message = (
                f"Sizes must be sorted descending: x[{index}]={sizes[index]} "
                f"< x[{index + 1}]={sizes[index + 1]}."
            )
        else:
            message = "Sizes must be sorted descending."

        self.index = index
        self.sizes = sizes
        self.message = message
        super().__init__(self.message)


class UnsupportedSpeedupException(Exception):
    """Exception raised when a closed form is asked for a non power-law speedup."""

    def __init__(self, kind: str = None, operation: str = None):
        if kind and operation:
            message = f"{operation} requires a power-law speedup, got {kind}."
        else:
            message = "Closed-form policies require a power-law speedup."

        self.kind = kind
        self.operation = operation
        self.message = message
        super().__init__(self.message)


class InvalidGranularityException(Exception):
    """Exception raised when a grain pool cannot give every active job a grain."""

    def __init__(self, granularity: int = None, n_jobs: int = None):
        if granularity is not None and n_jobs is not None:
            message = f"Granularity {granularity} is smaller than the {n_jobs} active jobs."
        elif granularity is not None:
            message = f"Granularity must be a positive integer, got {granularity}."
        else:
            message = "Invalid granularity."

        self.granularity = granularity
        self.n_jobs = n_jobs
        self.message = message
        super().__init__(self.message)


class UnknownPolicyException(Exception):
    """Exception raised when a policy name is not registered."""

    def __init__(self, name: str = None, allowed: list = None):
        if name and allowed:
            message = f'Policy "{name}" is not known. Known policies are: {", ".join(allowed)}'
        elif name:
            message = f'Policy "{name}" is not known.'
        else:
            message = "Unknown policy."

        self.name = name
        self.allowed = allowed
        self.message = message
        super().__init__(self.message)


class InvalidStateException(Exception):
    """Exception raised when a system state breaks ordering or positivity."""

    def __init__(self, reason: str = None):
        message = f"Invalid system state: {reason}." if reason else "Invalid system state."
        self.reason = reason
        self.message = message
        super().__init__(self.message)


class InvalidAllocationException(Exception):
    """Exception raised when an allocation vector holds a share outside [0, 1]."""

    def __init__(self, job_id: int = None, theta: float = None, reason: str = None):
        if job_id is not None and theta is not None:
            message = f"Invalid allocation for job {job_id}: theta={theta} must be in [0, 1]."
        elif reason:
            message = f"Invalid allocation: {reason}."
        else:
            message = "Invalid allocation."

        self.job_id = job_id
        self.theta = theta
        self.reason = reason
        self.message = message
        super().__init__(self.message)
