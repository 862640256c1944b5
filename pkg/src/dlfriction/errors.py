"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class FormatError(ValueError):
    """The lottery payout format does not support the requested operation."""


class CapabilityError(ValueError):
    """The input is valid but too large for the requested method."""


class UndefinedRatioError(ArithmeticError):
    """A ratio was requested whose denominator is zero."""


class LedgerError(ValueError):
    """A ledger operation was rejected; the state is left unchanged."""
