"""Exception types shared across the package."""


class SubgaussError(Exception):
    """Base class for all library errors."""


class DomainError(SubgaussError, ValueError):
    """An input lies outside the domain of an operation."""


class CapacityError(SubgaussError):
    """An exact computation would exceed a configured size cap."""
