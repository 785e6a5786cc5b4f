"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the domain where an operation is defined."""


class NonUniqueGeodesicError(DomainError):
    """Two points are too far apart (on a sphere) for a unique geodesic."""


class ScheduleError(DomainError):
    """A time schedule is incompatible with the requested probe or index set."""


class OrderContractError(RuntimeError):
    """An iteration produced iterates that violate the expected ordering.

    This signals that the semigroup/order pairing is not valid (the order is
    not preserved), not a numerical problem.
    """


class ConfigError(ValueError):
    """An experiment configuration is malformed or inconsistent."""
