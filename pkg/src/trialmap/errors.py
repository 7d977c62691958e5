"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class TrialMapError(Exception):
    """Base class for all toolkit errors."""


class InputError(TrialMapError):
    """Malformed or inconsistent input (CLI exit code 1)."""


class ParseError(InputError):
    """A text file could not be parsed; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source:
            where += f"{source}:"
        if line is not None:
            where += f"line {line}: "
        elif where:
            where += " "
        super().__init__(where + message)


class EvaluationError(TrialMapError):
    """A metric or map could not be evaluated (CLI exit code 2)."""
