"""Exception hierarchy shared by every module."""


class SymspaceError(Exception):
    """Base class for all toolkit errors."""


class InvalidDimensionError(SymspaceError, ValueError):
    pass


class DimensionMismatchError(SymspaceError, ValueError):
    pass


class DomainError(SymspaceError, ValueError):
    """An input vector does not lie in the required subspace."""


class DegeneracyError(SymspaceError, ValueError):
    """Rank-deficient or parallel input where independence is required."""


class InternalConsistencyError(SymspaceError, AssertionError):
    """Two independent computations of the same quantity disagree."""


class ConfigError(SymspaceError, ValueError):
    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"config field {field!r}: {message}")
