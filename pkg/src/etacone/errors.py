"""Exception types raised across the package."""


class EtaConeError(Exception):
    """Base class for every error raised by etacone."""


class ContractViolation(EtaConeError, ValueError):
    """An argument does not satisfy the documented precondition of a call."""


class PreconditionError(ContractViolation):
    """Input data breaks a structural requirement (e.g. eta below 1)."""


class DataError(EtaConeError, ValueError):
    """A distance or scale evaluator produced an unusable value (NaN, inf)."""


class InfeasibleError(EtaConeError, ValueError):
    """No eta in [1, inf) can repair the given distance table."""

    def __init__(self, message, triple=None):
        super().__init__(message)
        self.triple = triple


class DomainError(EtaConeError, ValueError):
    """A self-map produced a point outside its declared domain."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class EstimationError(EtaConeError, ValueError):
    """Every sampled pair was degenerate, so no ratio could be formed."""


class InconsistentDataError(EtaConeError, RuntimeError):
    """Observed iterates contradict the contraction data supplied by the caller."""


class TableFormatError(EtaConeError, ValueError):
    """Malformed distance-table or map file."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
