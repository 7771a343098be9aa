"""
Error types shared by the lab modules
Every failure raised by the library derives from LabError
"""


class LabError(Exception):
    """Base class for lab failures"""


class StructuralError(LabError):
    """Input has the wrong shape (non-square or asymmetric matrix)"""


class ArgumentError(LabError, ValueError):
    """Bad argument, e.g. objects living on different spaces"""


class ValidationError(LabError):
    """Input violates a declared invariant (weights, metric axioms)"""


class ResourceError(LabError):
    """A configured size limit would be exceeded"""

    def __init__(self, message, limit=None):
        super().__init__(message)
        self.limit = limit


class PreconditionError(LabError):
    """A required input element is missing"""

    def __init__(self, message, missing=()):
        super().__init__(message)
        self.missing = list(missing)


class DisconnectedError(LabError):
    """A graph that must be connected is not"""

    def __init__(self, message, classes=()):
        super().__init__(message)
        self.classes = [list(c) for c in classes]


class UsageError(LabError):
    """Invalid experiment configuration or command line"""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
