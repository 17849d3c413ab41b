"""Exception types shared across the package."""


class DynresError(Exception):
    """Base class for all errors raised by this package."""


class SelfLoopRejected(DynresError, ValueError):
    pass


class UnknownVertex(DynresError, IndexError):
    pass


class UnknownEdge(DynresError, KeyError):
    pass


class IsolatedVertex(DynresError, ValueError):
    pass


class NonPositiveWeight(DynresError, ValueError):
    pass


class Disconnected(DynresError):
    """The queried vertices lie in different connected components."""


class TooLarge(DynresError, ValueError):
    """Instance exceeds the cap of a dense oracle."""


class RankOutOfRange(DynresError, IndexError):
    pass


class VertexNotOnWalk(DynresError, ValueError):
    pass


class InvalidPosition(DynresError, ValueError):
    pass


class WrongMode(DynresError):
    pass


class PairNotRegistered(DynresError, KeyError):
    pass


class TerminalBudgetExceeded(DynresError, RuntimeError):
    pass


class ParseError(DynresError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class StreamInvalid(DynresError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class InfeasibleParams(DynresError, ValueError):
    pass


class SmallInstanceWarning(UserWarning):
    """beta * m is below log n, so the hitting guarantees are not in force."""
