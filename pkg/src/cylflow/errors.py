"""Exception hierarchy shared by every module.

Each class maps onto one CLI exit code (see :mod:`cylflow.cli`).
"""


class CylflowError(Exception):
    """Base class for all package errors."""

    exit_code = 4


class ConfigurationError(CylflowError, ValueError):
    exit_code = 2


class ParameterError(CylflowError, ValueError):
    exit_code = 2


class ShapeError(CylflowError, ValueError):
    exit_code = 4


class DomainError(CylflowError, ValueError):
    exit_code = 4


class ValidationError(CylflowError, ValueError):
    """Input data violates a physical precondition (e.g. flux compatibility)."""

    exit_code = 3


class SolvabilityError(ValidationError):
    """Right-hand side of a pure Neumann problem has nonzero mean."""


class ConsistencyError(CylflowError):
    exit_code = 3


class ConvergenceError(CylflowError, RuntimeError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class CapacityError(CylflowError, ValueError):
    def __init__(self, message, max_size=None):
        super().__init__(message)
        self.max_size = max_size


class BlowUpError(CylflowError, RuntimeError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class DataError(CylflowError, ValueError):
    """Non-finite quantity encountered while recording a ledger row."""

    def __init__(self, message, term=None):
        super().__init__(message)
        self.term = term


class ParseError(CylflowError, ValueError):
    exit_code = 2
