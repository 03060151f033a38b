class InvalidSpeedupException(Exception):
    """Exception raised when a speedup function is built with out-of-range parameters."""

    def __init__(self, kind: str = None, parameter: str = None, value: float = None):
        if kind and parameter is not None:
            message = f"Invalid {kind} speedup: {parameter}={value} must lie strictly between 0 and 1."
        elif kind:
            message = f"Invalid {kind} speedup function."
        else:
            message = "Invalid speedup function."

        self.kind = kind
        self.parameter = parameter
        self.value = value
        self.message = message
        super().__init__(self.message)


class SpeedupSpecParseException(Exception):
    """Exception raised when a speedup spec string such as 'amdahl:f=0.9' cannot be parsed."""

    def __init__(self, spec: str = None, reason: str = None):
        if spec and reason:
            message = f"Cannot parse speedup spec '{spec}': {reason}."
        elif spec:
            message = f"Cannot parse speedup spec '{spec}'."
        else:
            message = "Cannot parse speedup spec."

        self.spec = spec
        self.reason = reason
        self.message = message
        super().__init__(self.message)


class InvalidCurveException(Exception):
    """Exception raised when a measured speedup curve violates its invariants."""

    def __init__(self, reason: str = None, path: str = None):
        if reason and path:
            message = f"Invalid speedup curve in '{path}': {reason}."
        elif reason:
            message = f"Invalid speedup curve: {reason}."
        else:
            message = "Invalid speedup curve."

        self.reason = reason
        self.path = path
        self.message = message
        super().__init__(self.message)


class DegenerateCurveException(Exception):
    """Exception raised when a curve carries no information about the exponent."""

    def __init__(self, cores: list = None):
        if cores:
            message = f"Cannot fit a power law: all cores collapse to {sorted(set(cores))}."
        else:
            message = "Cannot fit a power law to a degenerate curve."

        self.cores = cores
        self.message = message
        super().__init__(self.message)


class InvalidServerCountException(Exception):
    """Exception raised when a speedup is evaluated at a negative server count."""

    def __init__(self, k=None):
        message = f"Server count must be nonnegative, got {k}." if k is not None else "Server count must be nonnegative."
        self.k = k
        self.message = message
        super().__init__(self.message)
