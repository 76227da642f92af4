"""Domain error hierarchy.

Every error carries a stable ``code`` string so the HTTP layer and the CLI
can map failures without string matching on messages.
"""

from __future__ import annotations


class ProvlabError(Exception):
    """Base class for all domain errors."""

    code = "ERROR"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class SchemaNotFoundError(ProvlabError):
    code = "SCHEMA"


class ValidationFailedError(ProvlabError):
    """Raised when a write is rejected; carries the full report."""

    code = "VALIDATION"

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class NotFoundError(ProvlabError):
    code = "NOTFOUND"


class CycleError(ProvlabError):
    code = "CYCLE"


class ParseError(ProvlabError):
    code = "PARSE"


class VocabularyError(ProvlabError):
    code = "VOCAB"


class TruncatedError(ProvlabError):
    code = "TRUNCATED"


class EncodingError(ProvlabError):
    code = "ENCODING"


class BadTypeError(ProvlabError):
    code = "BADTYPE"


class SyntaxFormatError(ProvlabError):
    code = "SYNTAX"


class HeaderError(ProvlabError):
    code = "HEADER"


class ShapeError(ProvlabError):
    code = "SHAPE"


class DomainError(ProvlabError):
    code = "DOMAIN"


class EmptyInputError(ProvlabError):
    code = "EMPTY"


class CorruptBlobError(ProvlabError):
    code = "CORRUPT"


class StorageIOError(ProvlabError):
    code = "IO"
