"""Rank-size series.

Values are ranked in descending order. Equal values are ranked by their origin
ordinal, so the item that appears earlier in the text gets the smaller rank and
every item receives its own rank.
"""

import logging
from collections.abc import Mapping, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from punkt.framework.errors import EmptySeriesError, NonPositiveValueError, PunktError
from punkt.framework.series.series import WordFrequencyTable

logger = logging.getLogger(__name__)


class RankedItem(BaseModel):
    model_config = ConfigDict(frozen=True)

    rank: int
    value: int | float
    origin_ordinal: int
    key: str | None = None


class RankedSeries(BaseModel):
    """Items ordered by rank 1..n, values non-increasing."""

    model_config = ConfigDict(frozen=True)

    items: tuple[RankedItem, ...]
    label: str = ""

    @model_validator(mode="after")
    def _check_order(self) -> "RankedSeries":
        for position, item in enumerate(self.items, start=1):
            if item.rank != position:
                raise ValueError(f"rank {item.rank} found at position {position}")
        for before, after in zip(self.items, self.items[1:], strict=False):
            if after.value > before.value or (
                after.value == before.value
                and after.origin_ordinal <= before.origin_ordinal
            ):
                raise ValueError(
                    f"ranks {before.rank} and {after.rank} are out of order"
                )
        return self

    @property
    def max_rank(self) -> int:
        return len(self.items)

    def ranks(self) -> np.ndarray:
        return np.arange(1, len(self.items) + 1, dtype=float)

    def values(self) -> np.ndarray:
        return np.array([item.value for item in self.items], dtype=float)

    def value_at(self, rank: int) -> int | float:
        return self.items[rank - 1].value


def rank_descending(
    series: Sequence[tuple[int, int | float]],
    label: str = "",
    keys: Mapping[int, str] | None = None,
) -> RankedSeries:
    """Rank ``(ordinal, value)`` pairs by value, largest first.

    Args:
        series: Pairs of origin ordinal and positive value. Ordinals must be
            distinct; input order does not matter.
        label: Free text naming the source and class.
        keys: Optional ordinal to display-key mapping (the word, for Zipf ranks).

    Raises:
        EmptySeriesError: ``series`` is empty.
        NonPositiveValueError: A value is zero or negative.
    """
    if not series:
        raise EmptySeriesError(f"cannot rank an empty series {label!r}".rstrip())
    ordinals = [ordinal for ordinal, _ in series]
    if len(set(ordinals)) != len(ordinals):
        raise PunktError(f"duplicate origin ordinals in series {label!r}")
    for ordinal, value in series:
        if value <= 0:
            raise NonPositiveValueError(
                f"value {value} at ordinal {ordinal} is not positive; "
                "log-log analysis needs positive values"
            )

    ordered = sorted(series, key=lambda pair: (-pair[1], pair[0]))
    keys = keys or {}
    return RankedSeries(
        items=tuple(
            RankedItem(
                rank=rank, value=value, origin_ordinal=ordinal, key=keys.get(ordinal)
            )
            for rank, (ordinal, value) in enumerate(ordered, start=1)
        ),
        label=label,
    )


def zipf_rank(table: WordFrequencyTable, label: str = "words") -> RankedSeries:
    """Rank words by frequency; ties go to the word that appeared first."""
    pairs = [(entry.first_ordinal, entry.frequency) for entry in table.entries.values()]
    words = {entry.first_ordinal: word for word, entry in table.entries.items()}
    return rank_descending(pairs, label=label, keys=words)
