"""Exception hierarchy shared by the library and the command line driver."""


class TrsLtlError(Exception):
    """Base class for every error raised by this package."""


class InvalidPosition(TrsLtlError, IndexError):
    pass


class UnknownSymbol(TrsLtlError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class BoundExceeded(TrsLtlError):
    """A brute-force exploration produced more distinct terms than allowed."""

    def __init__(self, bound: int):
        super().__init__(f"more than {bound} distinct terms generated")
        self.bound = bound


class Property2Violated(TrsLtlError):
    pass


class AmbiguousTarget(TrsLtlError):
    pass


class CollapsedConfiguration(TrsLtlError):
    """Normalization was asked to add a transition for a configuration that
    already reduces to a state."""

    def __init__(self, state):
        super().__init__(f"configuration already reduces to state {state}")
        self.state = state


class CompletionBoundError(TrsLtlError):
    """Base for the resource limits of completion (CLI exit code 3)."""


class StateBudgetExceeded(CompletionBoundError):
    pass


class MaxStepsExceeded(CompletionBoundError):
    pass


class InputNotNormalized(TrsLtlError):
    pass


class EmptyInitials(TrsLtlError):
    pass


class ParseError(TrsLtlError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
        self.line = line
        self.column = column
