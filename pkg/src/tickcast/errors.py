"""Exception hierarchy."""


class TickcastError(Exception):
    pass


class SeriesTooShort(TickcastError, ValueError):
    pass


class TooFewEvents(TickcastError, ValueError):
    pass


class RangeTooShort(TickcastError, ValueError):
    pass


class NumericOverflow(TickcastError, ArithmeticError):
    pass


class EmptyNode(TickcastError, ValueError):
    pass


class InvalidSplit(TickcastError, ValueError):
    pass


class DegenerateData(TickcastError, ValueError):
    pass


class Diverged(TickcastError, ArithmeticError):
    pass


class DimensionMismatch(TickcastError, ValueError):
    pass


class TooFewRows(TickcastError, ValueError):
    pass


class BadK(TickcastError, ValueError):
    pass


class TooFewClusters(TickcastError, ValueError):
    pass


class TooFewFeatures(TickcastError, ValueError):
    pass


class SingleCentroid(TickcastError, ValueError):
    pass


class SingularSystem(TickcastError, ArithmeticError):
    pass


class LengthMismatch(TickcastError, ValueError):
    pass


class EmptySpan(TickcastError, ValueError):
    pass


class BadSpec(TickcastError, ValueError):
    pass


class EmptyFile(TickcastError, ValueError):
    pass


class UnsortedTimestamps(TickcastError, ValueError):
    pass


class ParseError(TickcastError, ValueError):
    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}")
        self.line = line
