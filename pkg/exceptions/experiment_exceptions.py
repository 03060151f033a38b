class InvalidExperimentConfigException(Exception):
    """Exception raised when an experiment configuration is out of range."""

    def __init__(self, field: str = None, value=None, reason: str = None):
        if field and reason:
            message = f"Invalid experiment config {field}={value}: {reason}."
        elif field:
            message = f"Invalid experiment config {field}={value}."
        else:
            message = "Invalid experiment config."

        self.field = field
        self.value = value
        self.reason = reason
        self.message = message
        super().__init__(self.message)


class DistributionSpecParseException(Exception):
    """Exception raised when a workload spec such as 'pareto:shape=1.5,scale=1' is malformed."""

    def __init__(self, spec: str = None, reason: str = None):
        if spec and reason:
            message = f"Cannot parse distribution '{spec}': {reason}."
        elif spec:
            message = f"Cannot parse distribution '{spec}'."
        else:
            message = "Cannot parse distribution."

        self.spec = spec
        self.reason = reason
        self.message = message
        super().__init__(self.message)


class SizesFileException(Exception):
    """Exception raised when a job-size CSV is missing its header or holds a bad row."""

    def __init__(self, path: str = None, row: int = None, reason: str = None):
        if path and row is not None:
            message = f"Bad job-size file '{path}' at row {row}: {reason}."
        elif path:
            message = f"Bad job-size file '{path}': {reason}."
        else:
            message = "Bad job-size file."

        self.path = path
        self.row = row
        self.reason = reason
        self.message = message
        super().__init__(self.message)


class ExperimentIOException(Exception):
    """Exception raised when reading or writing experiment artifacts fails."""

    def __init__(self, path: str = None, reason: str = None):
        if path and reason:
            message = f"I/O failure on '{path}': {reason}."
        elif path:
            message = f"I/O failure on '{path}'."
        else:
            message = "Experiment I/O failure."

        self.path = path
        self.reason = reason
        self.message = message
        super().__init__(self.message)
