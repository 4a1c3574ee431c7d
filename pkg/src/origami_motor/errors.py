"""Exception hierarchy shared by all modules."""


class OrigamiMotorError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(OrigamiMotorError, ValueError):
    """An argument lies outside its valid domain."""


class GeometryError(ParameterError):
    """Fold geometry is infeasible (e.g. imaginary cell height)."""


class TraceFormatError(OrigamiMotorError):
    """A trace file cannot be parsed according to the CSV schema."""


class DataQualityError(OrigamiMotorError):
    """A trace parses but its content is physically implausible."""


class FitError(OrigamiMotorError):
    """A fit could not be performed or did not converge.

    ``report`` carries the best-so-far FitReport when one exists.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
