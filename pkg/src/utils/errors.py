"""
Error types for BlochID
Every failure the CLI can report maps onto one of these classes
"""


class BlochIDError(Exception):
    """Base class for all BlochID errors"""


class TraceFormatError(BlochIDError, ValueError):
    """A trace file could not be parsed"""

    def __init__(self, path, message: str, line: int = None, field: str = None):
        location = f"{path}"
        if line is not None:
            location += f":{line}"
        if field is not None:
            location += f" [{field}]"
        super().__init__(f"{location}: {message}")
        self.path = path
        self.line = line
        self.field = field


class TraceValidationError(BlochIDError, ValueError):
    """A trace violates the MeasurementTrace invariants"""


class NumericalFailure(BlochIDError, RuntimeError):
    """A numerical routine could not deliver a trustworthy result"""


class FitContractError(BlochIDError, ValueError):
    """Inputs to a fit, scan or discrimination run break its preconditions"""
