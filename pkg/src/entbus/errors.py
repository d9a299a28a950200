"""Exception types that callers (and the CLI exit-code contract) need to tell apart."""


class UnsupportedProfileError(ValueError):
    """Chain couplings do not follow the angular-momentum profile."""


class DimensionCapError(RuntimeError):
    """A computation would exceed its configured size cap."""


class PropagationError(RuntimeError):
    """Matrix-exponential propagation failed to converge."""


class ScheduleError(ValueError):
    """A bus schedule is inconsistent with the tracked bus occupancy."""


class GraphFormatError(ValueError):
    """Malformed graph input."""
