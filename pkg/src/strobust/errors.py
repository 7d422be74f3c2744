"""Exception hierarchy shared by every module in the package."""


class StrobustError(Exception):
    """Base class for all library errors."""


class OutOfDomain(StrobustError):
    """A time index fell outside a strictly padded signal domain."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        # envelope computed before the domain ran out, if any
        self.partial = partial


class ParseError(StrobustError):
    """Malformed signal or envelope file."""


class SpecSyntaxError(StrobustError):
    def __init__(self, message, line=None, col=None, source=None):
        self.line = line
        self.col = col
        self.source = source
        self.bare_message = message
        where = ""
        if line is not None:
            where = f"{source + ':' if source else ''}{line}:{col}: "
        super().__init__(where + message)


class DimensionError(SpecSyntaxError):
    """A spec refers to a variable the signal does not have."""


class NegationRejected(SpecSyntaxError):
    """Specs must be in positive normal form."""


class UnboundedHorizon(StrobustError):
    pass


class WindowOutOfRange(StrobustError):
    pass


class BudgetExceeded(StrobustError):
    pass


class Unsupported(StrobustError):
    pass


class ConfigError(StrobustError):
    pass
