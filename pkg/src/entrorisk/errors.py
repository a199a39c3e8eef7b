"""Exception types raised across the package."""


class EntroRiskError(ValueError):
    """Base class for all package errors."""


class DataError(EntroRiskError):
    """Malformed, inconsistent or unreadable input data."""


class EstimationError(EntroRiskError):
    """An estimator cannot produce a value for the given sample."""
