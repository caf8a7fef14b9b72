"""Punctuation-delimited segmentation.

Each mark class splits a document on its own terminators only: a comma segment
may contain dots and vice versa. A run of consecutive dots (an ellipsis) closes
a single segment for the classes that terminate on dots. Segment text is trimmed
of exterior whitespace, and segments that are empty after trimming are dropped.
Abbreviation dots ("Mr.") are ordinary terminators.
"""

import logging
from enum import StrEnum

import regex
from pydantic import BaseModel, ConfigDict, model_validator

from punkt.framework.corpus.corpus import CleanDocument

logger = logging.getLogger(__name__)

# Title abbreviations whose dots end dot-class segments.
ABBREVIATION_RE = regex.compile(r"\b(?:Mr|Mrs|Ms|Dr|St|Jr|Sr|Prof)\.")


class MarkClass(StrEnum):
    """A set of punctuation marks that end a segment."""

    DOT = "dot"
    COMMA = "comma"
    COLON = "colon"
    SEMICOLON = "semicolon"
    EXCLAMATION = "exclam"
    QUESTION = "question"
    UNIT_OF_THOUGHT = "unit"

    @property
    def terminators(self) -> frozenset[str]:
        return _TERMINATORS[self]

    @property
    def collapses_dot_runs(self) -> bool:
        return "." in self.terminators


_TERMINATORS: dict[MarkClass, frozenset[str]] = {
    MarkClass.DOT: frozenset("."),
    MarkClass.COMMA: frozenset(","),
    MarkClass.COLON: frozenset(":"),
    MarkClass.SEMICOLON: frozenset(";"),
    MarkClass.EXCLAMATION: frozenset("!"),
    MarkClass.QUESTION: frozenset("?"),
    MarkClass.UNIT_OF_THOUGHT: frozenset(".;!?"),
}

SINGLE_MARK_CLASSES: tuple[MarkClass, ...] = (
    MarkClass.DOT,
    MarkClass.COMMA,
    MarkClass.COLON,
    MarkClass.SEMICOLON,
    MarkClass.EXCLAMATION,
    MarkClass.QUESTION,
)

# Single-mark classes whose counts add up to the unit-of-thought count.
UNIT_OF_THOUGHT_PARTS: tuple[MarkClass, ...] = (
    MarkClass.DOT,
    MarkClass.SEMICOLON,
    MarkClass.EXCLAMATION,
    MarkClass.QUESTION,
)


def _terminator_pattern(mark_class: MarkClass) -> regex.Pattern[str]:
    others = sorted(mark_class.terminators - {"."})
    alternatives = [regex.escape(mark) for mark in others]
    if mark_class.collapses_dot_runs:
        alternatives.insert(0, r"\.+")
    return regex.compile("|".join(alternatives))


_TERMINATOR_PATTERNS: dict[MarkClass, regex.Pattern[str]] = {
    mark_class: _terminator_pattern(mark_class) for mark_class in MarkClass
}


class Segment(BaseModel):
    """A trimmed span between two terminators of one mark class.

    ``start``/``end`` are offsets in Unicode scalar values into the clean
    document. ``terminator`` is the mark that closed the segment (``None`` for a
    trailing unterminated span) and ``terminator_width`` the number of scalars
    it occupied (an ellipsis run counts every dot).
    """

    model_config = ConfigDict(frozen=True)

    ordinal: int
    start: int
    end: int
    terminator: str | None
    terminator_width: int
    length_chars: int

    @model_validator(mode="after")
    def _check_length(self) -> "Segment":
        if self.length_chars < 1 or self.length_chars != self.end - self.start:
            raise ValueError(
                f"segment length {self.length_chars} inconsistent with "
                f"[{self.start}, {self.end})"
            )
        return self


def _trim(content: str, start: int, end: int) -> tuple[int, int]:
    span = content[start:end]
    stripped = span.strip()
    if not stripped:
        return start, start
    leading = len(span) - len(span.lstrip())
    return start + leading, start + leading + len(stripped)


def _warn_on_abbreviations(doc: CleanDocument, mark_class: MarkClass) -> None:
    hits = len(ABBREVIATION_RE.findall(doc.content))
    if hits:
        logger.warning(
            "%s: %d abbreviation dots (Mr., Dr., ...) end %s segments",
            doc.source_id,
            hits,
            mark_class.value,
        )


def split_by_mark(doc: CleanDocument, mark_class: MarkClass) -> tuple[Segment, ...]:
    """Split ``doc`` into the segments closed by ``mark_class`` terminators.

    The document is scanned once. A document without terminators yields one
    segment holding the whole trimmed text.
    """
    content = doc.content
    segments: list[Segment] = []

    def emit(
        span_start: int, span_end: int, terminator: str | None, width: int
    ) -> None:
        start, end = _trim(content, span_start, span_end)
        if end > start:
            segments.append(
                Segment(
                    ordinal=len(segments),
                    start=start,
                    end=end,
                    terminator=terminator,
                    terminator_width=width,
                    length_chars=end - start,
                )
            )

    if mark_class.collapses_dot_runs:
        _warn_on_abbreviations(doc, mark_class)

    span_start = 0
    for match in _TERMINATOR_PATTERNS[mark_class].finditer(content):
        emit(span_start, match.start(), match.group()[0], len(match.group()))
        span_start = match.end()
    emit(span_start, len(content), None, 0)

    logger.debug(
        "%s: %d %s segments", doc.source_id, len(segments), mark_class.value
    )
    return tuple(segments)


def segment_length(segment: Segment) -> int:
    """Characters in the segment, interior blanks included, terminator excluded."""
    return segment.length_chars


def count_marks(doc: CleanDocument) -> dict[MarkClass, int]:
    """Count terminator occurrences per mark class.

    An ellipsis run counts as one dot. The unit-of-thought count is the sum of
    the dot, semicolon, exclamation and question counts.
    """
    counts = {
        mark_class: sum(
            1 for _ in _TERMINATOR_PATTERNS[mark_class].finditer(doc.content)
        )
        for mark_class in SINGLE_MARK_CLASSES
    }
    counts[MarkClass.UNIT_OF_THOUGHT] = sum(
        counts[mark_class] for mark_class in UNIT_OF_THOUGHT_PARTS
    )
    return counts
