"""Exception types raised by vosedge."""


class VosEdgeError(Exception):
    """Base class for all library errors."""


class UnsupportedFormat(VosEdgeError):
    pass


class CorruptData(VosEdgeError):
    pass


class OutOfBounds(VosEdgeError, IndexError):
    pass


class InvalidThreshold(VosEdgeError, ValueError):
    pass


class InvalidSpec(VosEdgeError, ValueError):
    pass


class EmptyTruth(VosEdgeError, ValueError):
    pass


class DimensionMismatch(VosEdgeError, ValueError):
    pass


class BothEmpty(VosEdgeError, ValueError):
    pass


def check_fraction(t: float, name: str = "threshold") -> None:
    if not (0.0 <= t <= 1.0):
        raise InvalidThreshold(f"{name} must lie in [0, 1], got {t}")
