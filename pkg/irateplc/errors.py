"""
Exceptions raised by the IRatePLC library.

Library code raises; the CLI and the MCP tools catch and report.
"""

from typing import Optional


class IRatePLCError(Exception):
    """Base class for every error raised by the library."""

    def __init__(self, message: str, source: Optional[str] = None, line: Optional[int] = None):
        super().__init__(message)
        self.message = message
        self.source = source
        self.line = line

    def located(self, source: str) -> "IRatePLCError":
        """Attach the document name the error came from."""
        self.source = source
        return self

    def __str__(self) -> str:
        parts = [p for p in (self.source, str(self.line) if self.line is not None else None) if p]
        if parts:
            return f"{':'.join(parts)}: {self.message}"
        return self.message


class ModelSyntaxError(IRatePLCError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"{message} (column {column})", line=line)
        self.column = column


class ModelError(IRatePLCError):
    pass


class UnknownFeatureError(ModelError):
    def __init__(self, feature: str, line: Optional[int] = None):
        super().__init__(f"unknown feature '{feature}'", line=line)
        self.feature = feature


class ChoiceError(IRatePLCError):
    pass


class CompletionError(IRatePLCError):
    def __init__(self, features):
        names = ", ".join(sorted(features))
        super().__init__(f"completion selects negated features: {names}")
        self.features = frozenset(features)


class ModelTooLargeError(IRatePLCError):
    pass


class UnknownRuleError(IRatePLCError):
    pass


class UnknownFormatError(IRatePLCError):
    pass


class IterationCapExceeded(IRatePLCError):
    pass


class DocumentLoadError(IRatePLCError):
    pass
