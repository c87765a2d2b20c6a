"""Exception hierarchy shared by all modules."""


class OsteosegError(Exception):
    """Base class for domain errors."""


class ParameterError(OsteosegError):
    """An argument violates an operation's precondition."""


class DegenerateInputError(OsteosegError):
    """The input has too little structure for the operation (e.g. a
    constant image handed to a histogram threshold)."""


class PipelineStepError(OsteosegError):
    """A pipeline step failed; carries the step name and the original error."""

    def __init__(self, step, cause):
        self.step = step
        self.cause = cause
        super().__init__(f"pipeline step '{step}' failed: {cause}")


class DegenerateContrastWarning(UserWarning):
    """Raised when contrast stretching collapses because the low and high
    percentile values coincide."""
