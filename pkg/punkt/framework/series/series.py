"""Length and frequency time series.

The length time series (LTS) lists segment lengths in text order. The frequency
time series (FTS) replaces every token by the whole-document frequency of its
folded form, read from a ``WordFrequencyTable``.
"""

import logging
from collections import Counter
from collections.abc import Sequence

from pydantic import BaseModel, ConfigDict, model_validator

from punkt.framework.corpus.corpus import Token
from punkt.framework.errors import EmptySeriesError, TableMismatchError
from punkt.framework.segmentation.segmentation import MarkClass, Segment

logger = logging.getLogger(__name__)


class LengthSeries(BaseModel):
    model_config = ConfigDict(frozen=True)

    mark_class: MarkClass
    values: tuple[tuple[int, int], ...]

    @model_validator(mode="after")
    def _check_values(self) -> "LengthSeries":
        ordinals = [ordinal for ordinal, _ in self.values]
        if any(a >= b for a, b in zip(ordinals, ordinals[1:], strict=False)):
            raise ValueError("length series ordinals must be strictly increasing")
        if any(length < 1 for _, length in self.values):
            raise ValueError("length series values must be at least 1")
        return self


class WordEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    frequency: int
    first_ordinal: int


class WordFrequencyTable(BaseModel):
    """Folded word to (frequency, ordinal of first occurrence)."""

    model_config = ConfigDict(frozen=True)

    entries: dict[str, WordEntry]
    total_tokens: int

    @model_validator(mode="after")
    def _check_totals(self) -> "WordFrequencyTable":
        total = sum(entry.frequency for entry in self.entries.values())
        if total != self.total_tokens:
            raise ValueError(
                f"frequencies sum to {total}, expected {self.total_tokens}"
            )
        return self

    @property
    def vocabulary_size(self) -> int:
        return len(self.entries)

    def frequency(self, word: str) -> int:
        return self.entries[word].frequency


class FrequencySeries(BaseModel):
    model_config = ConfigDict(frozen=True)

    values: tuple[tuple[int, int], ...]


def build_lts(segments: Sequence[Segment], mark_class: MarkClass) -> LengthSeries:
    """Map segments to ``(ordinal, length)`` pairs in text order."""
    if not segments:
        raise EmptySeriesError(f"no segments for class {mark_class.value}")
    return LengthSeries(
        mark_class=mark_class,
        values=tuple((segment.ordinal, segment.length_chars) for segment in segments),
    )


def build_word_frequency_table(tokens: Sequence[Token]) -> WordFrequencyTable:
    if not tokens:
        raise EmptySeriesError("no tokens to count")

    frequencies = Counter(token.folded for token in tokens)
    first_seen: dict[str, int] = {}
    for token in tokens:
        first_seen.setdefault(token.folded, token.ordinal)

    logger.debug(
        "Counted %d tokens over %d word types", len(tokens), len(frequencies)
    )
    return WordFrequencyTable(
        entries={
            word: WordEntry(frequency=frequencies[word], first_ordinal=ordinal)
            for word, ordinal in first_seen.items()
        },
        total_tokens=len(tokens),
    )


def build_fts(tokens: Sequence[Token], table: WordFrequencyTable) -> FrequencySeries:
    """Replace each token by its word's whole-document frequency."""
    values = []
    for token in tokens:
        entry = table.entries.get(token.folded)
        if entry is None:
            raise TableMismatchError(
                f"token {token.surface!r} at ordinal {token.ordinal} "
                "is not in the table"
            )
        values.append((token.ordinal, entry.frequency))
    return FrequencySeries(values=tuple(values))
