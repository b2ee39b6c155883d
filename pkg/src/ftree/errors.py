"""Exception types shared across the package."""


class FtreeError(Exception):
    """Base class for all domain errors raised by this package."""


class MalformedWordError(FtreeError):
    """A word references a generator that does not exist."""


class ResourceLimitError(FtreeError):
    """A configurable resource bound (word length, node budget, group order) was hit."""


class DiagramError(FtreeError):
    """A diagram file failed validation; carries line information when available."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", col {column}"
            message = f"{where}: {message}"
        super().__init__(message)
