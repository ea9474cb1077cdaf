"""Exception hierarchy shared by the planner, tracer and scenario loader."""


class PweError(Exception):
    """Base class for all errors raised by :mod:`uavpwe`."""


class CollinearOverlap(PweError, ValueError):
    """Two segments share a sub-segment, so they have no unique intersection."""


class NonPositivePower(PweError, ValueError):
    pass


class ZeroDistance(PweError, ValueError):
    pass


class DegenerateSteer(PweError, ValueError):
    """A Steer function whose departure equals its arrival has no mirror normal."""


class InvalidScene(PweError, ValueError):
    pass


class ParseError(PweError, ValueError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class ValidationError(PweError, ValueError):
    pass
