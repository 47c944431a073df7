"""Exception types shared across the package."""


class ValidationError(ValueError):
    """An input failed a structural or numerical precondition."""


class UsageError(ValueError):
    """A call or command was malformed (bad flags, empty grids, ...)."""


class ImpossibleBranchError(ValidationError):
    """A conditional state was requested for a zero-probability branch."""


class PlanningError(ValidationError):
    """Network planning cannot proceed on the given graph."""
