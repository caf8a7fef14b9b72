"""Report models and file writers.

Output layout for one document::

    <out>/<source_id>/report.json
    <out>/<source_id>/<class>.csv            rank,value,origin
    <out>/<source_id>/<class>.loglog.dat     log10(rank) log10(value)
    <out>/<source_id>/<class>.semilog.dat    rank log10(value), with the stretched fit
    <out>/<source_id>/<class>.segments.csv   on request
    <out>/<source_id>/<class>.series.csv     on request
    <out>/<source_id>/words.csv              rank,value,origin,word
    <out>/<source_id>/words.loglog.dat

Files are first written to a scratch directory next to the target and moved in
only once all of them are complete. Rerunning into an existing directory removes
the output files of classes the new report no longer covers.
"""

import csv
import logging
import math
import os
import shutil
import tempfile
from collections.abc import Callable, Iterable, Sequence
from pathlib import Path

from pydantic import BaseModel

from punkt.framework.corpus.corpus import TransformRecord
from punkt.framework.errors import StageError
from punkt.framework.fitting.models import (
    BreakEstimate,
    FitWindow,
    ModelFit,
    PowerLawFit,
)
from punkt.framework.ranking.ranking import RankedSeries
from punkt.framework.segmentation.segmentation import MarkClass, Segment

logger = logging.getLogger(__name__)

REPORT_FILE = "report.json"
WORDS_STEM = "words"

CLASS_SUFFIXES = (
    ".csv",
    ".loglog.dat",
    ".semilog.dat",
    ".segments.csv",
    ".series.csv",
)


def analysis_outputs() -> list[str]:
    """Every file name an analysis may write, across all classes and options."""
    return [
        *(f"{c.value}{suffix}" for c in MarkClass for suffix in CLASS_SUFFIXES),
        f"{WORDS_STEM}.csv",
        f"{WORDS_STEM}.loglog.dat",
        f"{WORDS_STEM}.fts.csv",
        REPORT_FILE,
    ]


class FitRecord(BaseModel):
    """Serialized form of a fit."""

    label: str
    model: str
    params: dict[str, float]
    window: FitWindow
    r_squared: float | None = None
    residual_sum: float
    n_points: int

    @classmethod
    def from_fit(cls, label: str, fit: ModelFit) -> "FitRecord":
        return cls(
            label=label,
            model=fit.model,
            params=fit.params(),
            window=fit.window,
            r_squared=fit.r_squared if isinstance(fit, PowerLawFit) else None,
            residual_sum=fit.residual_sum,
            n_points=fit.n_points,
        )


class ClassReport(BaseModel):
    mark_class: MarkClass
    mark_count: int
    segment_count: int
    distinct_lengths: int = 0
    min_length: int | None = None
    max_length: int | None = None
    total_length: int = 0
    mean_length: float | None = None
    rank1_length: int | None = None
    power_law: FitRecord | None = None
    power_law_error: str | None = None
    stretched: FitRecord | None = None
    stretched_error: str | None = None
    preferred_model: str | None = None
    break_estimate: BreakEstimate | None = None
    break_error: str | None = None


class WordCount(BaseModel):
    rank: int
    word: str
    frequency: int


class WordReport(BaseModel):
    token_count: int
    vocabulary_size: int
    top_words: list[WordCount] = []
    zipf: FitRecord | None = None
    zipf_error: str | None = None


class AnalysisReport(BaseModel):
    """Everything ``analyze`` measured for one document."""

    source_id: str
    preprocessing: list[TransformRecord]
    mark_ratio: float | None = None
    classes: list[ClassReport]
    words: WordReport | None = None


class ClassComparison(BaseModel):
    mark_class: MarkClass
    exponents: list[float | None]
    rank1_lengths: list[int | None]
    mark_counts: list[int]
    exponent_differences: dict[str, float | None]


class ComparisonReport(BaseModel):
    sources: list[str]
    classes: list[ClassComparison]
    zipf_exponents: list[float | None]
    # Per source: classes whose rank-1 length is at least the first source's.
    rank1_at_least_first: list[int]


def dump_json(model: BaseModel) -> str:
    return model.model_dump_json(indent=2) + "\n"


def write_json(path: Path, model: BaseModel) -> None:
    path.write_text(dump_json(model), encoding="utf-8")


def _write_csv(
    path: Path, header: Sequence[str], rows: Iterable[Sequence[object]]
) -> None:
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_rank_csv(path: Path, series: RankedSeries, with_keys: bool = False) -> None:
    header = ["rank", "value", "origin"] + (["word"] if with_keys else [])
    _write_csv(
        path,
        header,
        (
            [item.rank, item.value, item.origin_ordinal]
            + ([item.key or ""] if with_keys else [])
            for item in series.items
        ),
    )


def write_loglog(path: Path, series: RankedSeries) -> None:
    """Two whitespace-separated columns, log10(rank) and log10(value)."""
    with path.open("w", encoding="utf-8", newline="") as f:
        for item in series.items:
            f.write(f"{math.log10(item.rank)!r} {math.log10(item.value)!r}\n")


def write_semilog(path: Path, series: RankedSeries) -> None:
    """Two whitespace-separated columns, rank and log10(value)."""
    with path.open("w", encoding="utf-8", newline="") as f:
        for item in series.items:
            f.write(f"{item.rank} {math.log10(item.value)!r}\n")


def write_segments_csv(path: Path, segments: Sequence[Segment]) -> None:
    _write_csv(
        path,
        ["ordinal", "start", "end", "terminator", "length"],
        (
            [s.ordinal, s.start, s.end, s.terminator or "", s.length_chars]
            for s in segments
        ),
    )


def write_series_csv(
    path: Path, source_id: str, name: str, values: Sequence[tuple[int, int]]
) -> None:
    with path.open("w", encoding="utf-8", newline="") as f:
        f.write(f"# source_id={source_id} class={name}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["ordinal", "value"])
        writer.writerows(values)


def write_atomically(
    target_dir: Path,
    writers: dict[str, Callable[[Path], None]],
    stale: Iterable[str] = (),
) -> list[Path]:
    """Run each writer on a scratch file, then move all files into ``target_dir``.

    A new ``target_dir`` is created only once every writer has succeeded. In an
    existing one, files named by ``stale`` are removed along with the ones being
    replaced, and a failed move puts the previous files back.
    """
    target_dir.parent.mkdir(parents=True, exist_ok=True)
    scratch = Path(
        tempfile.mkdtemp(prefix=f".{target_dir.name}-", dir=target_dir.parent)
    )
    staged = scratch / "new"
    try:
        staged.mkdir()
        for name, writer in writers.items():
            writer(staged / name)
        if target_dir.exists():
            _swap_files(staged, target_dir, scratch / "old", list(writers), stale)
        else:
            os.replace(staged, target_dir)
    except Exception as e:
        raise StageError("write", e) from e
    finally:
        shutil.rmtree(scratch, ignore_errors=True)
    logger.info("Wrote %d files to %s", len(writers), target_dir)
    return [target_dir / name for name in writers]


def _swap_files(
    staged: Path,
    target_dir: Path,
    backup: Path,
    names: Sequence[str],
    stale: Iterable[str],
) -> None:
    backup.mkdir()
    moved_out: list[str] = []
    moved_in: list[str] = []
    try:
        for name in dict.fromkeys([*names, *stale]):
            if (target_dir / name).is_file():
                os.replace(target_dir / name, backup / name)
                moved_out.append(name)
        for name in names:
            os.replace(staged / name, target_dir / name)
            moved_in.append(name)
    except OSError:
        for name in moved_in:
            (target_dir / name).unlink(missing_ok=True)
        for name in moved_out:
            os.replace(backup / name, target_dir / name)
        raise
    removed = len(moved_out) - len(set(moved_out) & set(names))
    if removed:
        logger.info("Removed %d stale files from %s", removed, target_dir)


def format_summary(report: AnalysisReport) -> str:
    """Human-readable per-class table for the terminal."""
    lines = [
        f"Source: {report.source_id}",
        f"{'class':<10} {'marks':>7} {'segs':>7} {'max':>7} {'mean':>8} "
        f"{'eta':>7} {'R^2':>6} {'window':>11}",
    ]
    for row in report.classes:
        fit = row.power_law
        eta = f"{fit.params['exponent']:.3f}" if fit else "-"
        r2 = f"{fit.r_squared:.3f}" if fit and fit.r_squared is not None else "-"
        window = f"[{fit.window.r_min},{fit.window.r_max}]" if fit else "-"
        mean = f"{row.mean_length:.1f}" if row.mean_length is not None else "-"
        lines.append(
            f"{row.mark_class.value:<10} {row.mark_count:>7} {row.segment_count:>7} "
            f"{row.max_length if row.max_length is not None else '-':>7} {mean:>8} "
            f"{eta:>7} {r2:>6} {window:>11}"
        )
    if report.mark_ratio is not None:
        lines.append(f"(dot+comma)/(other marks): {report.mark_ratio:.2f}")
    if report.words is not None:
        words = report.words
        zeta = f"{words.zipf.params['exponent']:.3f}" if words.zipf else "-"
        lines.append(
            f"words: {words.token_count} tokens, {words.vocabulary_size} types, "
            f"zeta={zeta}"
        )
    return "\n".join(lines)


def format_comparison(report: ComparisonReport) -> str:
    width = max(12, *(len(source) + 2 for source in report.sources))
    header = f"{'class':<10} {'':<6}" + "".join(
        f"{source:>{width}}" for source in report.sources
    )
    lines = [header]

    def cell(value: float | int | None, fmt: str) -> str:
        return f"{'-' if value is None else format(value, fmt):>{width}}"

    for row in report.classes:
        name = row.mark_class.value
        lines.append(
            f"{name:<10} {'eta':<6}" + "".join(cell(v, ".3f") for v in row.exponents)
        )
        lines.append(
            f"{'':<10} {'rank1':<6}" + "".join(cell(v, "d") for v in row.rank1_lengths)
        )
        lines.append(
            f"{'':<10} {'marks':<6}" + "".join(cell(v, "d") for v in row.mark_counts)
        )
    lines.append(
        f"{'words':<10} {'zeta':<6}"
        + "".join(cell(v, ".3f") for v in report.zipf_exponents)
    )
    return "\n".join(lines)
