"""Exception types shared across the package."""


class PrecisionError(ValueError):
    """A requested precision is unavailable or inconsistent."""


class PrecisionOverflowError(PrecisionError):
    """A mantissa does not fit the supported signed 64-bit range."""


class DegenerateDirectionError(ValueError):
    """Direction requested between coincident points or parallel lines."""


class MembershipError(ValueError):
    """A point does not lie in the cell set it was conditioned on."""


class DomainError(ValueError):
    """Input outside the supported geometric configuration band."""


class PreconditionError(ValueError):
    """Caller-asserted precondition found to be violated."""


class RegressionError(ValueError):
    """Too few scales for a dimension fit."""
