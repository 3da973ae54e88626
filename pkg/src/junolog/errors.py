"""Exception types raised across the pipeline."""


class JunologError(Exception):
    """Base class for every error this package raises on purpose."""


class ParseError(JunologError, ValueError):
    """A syslog line could not be turned into a record."""

    def __init__(self, message, line_number=None):
        super().__init__(message)
        self.line_number = line_number


class MalformedTimestamp(ParseError):
    pass


class MissingDevice(ParseError):
    pass


class LabelIndexOutOfRange(JunologError, ValueError):
    pass


class EmptyCorpus(JunologError, ValueError):
    pass


class InsufficientData(JunologError, ValueError):
    pass


class InvalidNu(JunologError, ValueError):
    pass


class InfeasibleBox(JunologError, ValueError):
    pass


class DidNotConverge(JunologError, RuntimeError):
    """The SMO loop hit its iteration cap.

    ``diagnostics`` holds the iteration count, the last KKT gap and the
    partial dual solution so callers can decide what to do with it.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class LengthMismatch(JunologError, ValueError):
    pass


class UnlabeledCorpus(JunologError, ValueError):
    pass


class UnsupportedVersion(JunologError, ValueError):
    pass


class CorruptModel(JunologError, ValueError):
    pass
