"""Exception types shared across the package."""


class KGExploreError(Exception):
    """Base class for all package errors."""


class GraphFormatError(KGExploreError):
    """Malformed or inconsistent graph input (carries the offending line number)."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class UnknownIdError(KGExploreError):
    """An entity, concept, or document id that the graph/corpus does not know."""


class CorpusFormatError(KGExploreError):
    """Malformed document record stream."""


class IndexFormatError(KGExploreError):
    """Unreadable, corrupted, or incompatible index file."""


class EnumerationCapError(KGExploreError):
    """Path enumeration exceeded its work cap; carries the partial result count."""

    def __init__(self, message: str, partial_count: int):
        super().__init__(message)
        self.partial_count = partial_count


class HopIndexBudgetError(KGExploreError):
    """Precomputed hop index would exceed its memory budget."""
