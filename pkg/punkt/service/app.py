"""Pipeline orchestration behind the ``analyze``, ``zipf`` and ``compare`` commands."""

import logging
import sys
from collections.abc import Callable, Iterator, Sequence
from contextlib import contextmanager
from functools import partial
from multiprocessing import Pool
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict

from punkt.framework.corpus.corpus import (
    CleanDocument,
    load_document,
    normalize_text,
    strip_boilerplate,
    strip_chapter_heads,
    tokenize_words,
)
from punkt.framework.errors import (
    ConvergenceError,
    DegenerateFitError,
    InsufficientPointsError,
    PunktError,
    StageError,
)
from punkt.framework.fitting.fitting import (
    detect_break,
    fit_power_law,
    fit_stretched_exponential,
)
from punkt.framework.fitting.models import FitWindow, PowerLawFit
from punkt.framework.ranking.ranking import RankedSeries, rank_descending, zipf_rank
from punkt.framework.segmentation.segmentation import (
    SINGLE_MARK_CLASSES,
    MarkClass,
    count_marks,
    split_by_mark,
)
from punkt.framework.series.series import (
    build_fts,
    build_lts,
    build_word_frequency_table,
)
from punkt.service.reports import (
    REPORT_FILE,
    WORDS_STEM,
    AnalysisReport,
    ClassComparison,
    ClassReport,
    ComparisonReport,
    FitRecord,
    WordCount,
    WordReport,
    analysis_outputs,
    write_atomically,
    write_json,
    write_loglog,
    write_rank_csv,
    write_segments_csv,
    write_semilog,
    write_series_csv,
)
from punkt.service.settings import Settings, get_settings

logger = logging.getLogger(__name__)

# Errors that mean "this fit cannot be made on this data", as opposed to bad input.
FIT_REFUSALS = (InsufficientPointsError, DegenerateFitError, ConvergenceError)

TOP_WORDS = 10
ZIPF_FILE = "zipf.json"
COMPARISON_FILE = "comparison.json"

Writers = dict[str, Callable[[Path], None]]


def configure_logging(level: str | None = None) -> None:
    level = level or get_settings().log_level
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[logging.StreamHandler(sys.stderr)],
    )


@contextmanager
def stage(name: str) -> Iterator[None]:
    """Re-raise analysis and I/O failures as ``StageError`` naming ``name``."""
    try:
        yield
    except StageError:
        raise
    except (PunktError, OSError) as e:
        raise StageError(name, e) from e


def prepare_document(
    path: Path, settings: Settings, source_id: str | None = None
) -> CleanDocument:
    """Load a file and run the enabled cleaning steps in their fixed order."""
    with stage("load"):
        raw = load_document(path, source_id=source_id)
    if settings.strip_boilerplate:
        with stage("strip_boilerplate"):
            raw = strip_boilerplate(raw, settings.marker_config())
    if settings.strip_heads:
        with stage("strip_chapter_heads"):
            doc = strip_chapter_heads(raw, settings.heading_patterns)
    else:
        doc = CleanDocument(
            source_id=raw.source_id,
            content=raw.content,
            normalization_log=raw.normalization_log,
        )
    with stage("normalize"):
        return normalize_text(doc, settings.normalization_options())


class ClassAnalysis(BaseModel):
    """A class report with the data behind its dump files."""

    model_config = ConfigDict(frozen=True)

    report: ClassReport
    writers: Writers = {}


def _power_law_record(
    report: dict[str, Any], label: str, ranked: RankedSeries, window: FitWindow
) -> PowerLawFit | None:
    try:
        fit = fit_power_law(ranked, window)
    except FIT_REFUSALS as e:
        logger.warning("%s: power-law fit refused: %s", label, e)
        report["power_law_error"] = str(e)
        return None
    report["power_law"] = FitRecord.from_fit(label, fit)
    return fit


def analyze_class(
    doc: CleanDocument, mark_class: MarkClass, mark_count: int, settings: Settings
) -> ClassAnalysis:
    """Split, rank and fit one mark class.

    Fits that the data cannot support are recorded in the report rather than
    raised; a class with no segments yields a report without fits or files.
    """
    label = f"{doc.source_id}/{mark_class.value}"
    window = settings.fit_window(mark_class)
    segments = split_by_mark(doc, mark_class)
    logger.info("%s: %d segments, %d marks", label, len(segments), mark_count)
    if not segments:
        return ClassAnalysis(
            report=ClassReport(
                mark_class=mark_class, mark_count=mark_count, segment_count=0
            )
        )

    lts = build_lts(segments, mark_class)
    ranked = rank_descending(lts.values, label=label)
    lengths = [length for _, length in lts.values]
    total = sum(lengths)
    report: dict[str, Any] = {
        "mark_class": mark_class,
        "mark_count": mark_count,
        "segment_count": len(segments),
        "distinct_lengths": len(set(lengths)),
        "min_length": min(lengths),
        "max_length": max(lengths),
        "total_length": total,
        "mean_length": total / len(lengths),
        "rank1_length": int(ranked.value_at(1)),
    }

    power_law = _power_law_record(report, label, ranked, window)
    if settings.stretched:
        try:
            stretched = fit_stretched_exponential(ranked, window)
        except FIT_REFUSALS as e:
            logger.warning("%s: stretched-exponential fit refused: %s", label, e)
            report["stretched_error"] = str(e)
        else:
            report["stretched"] = FitRecord.from_fit(label, stretched)
            if power_law is not None:
                report["preferred_model"] = min(
                    (power_law, stretched), key=lambda fit: fit.residual_sum
                ).model
    if settings.breaks:
        try:
            report["break_estimate"] = detect_break(ranked, r_min=settings.fit_min)
        except FIT_REFUSALS as e:
            logger.warning("%s: break detection refused: %s", label, e)
            report["break_error"] = str(e)

    name = mark_class.value
    writers: Writers = {
        f"{name}.csv": partial(write_rank_csv, series=ranked),
        f"{name}.loglog.dat": partial(write_loglog, series=ranked),
    }
    if settings.stretched:
        writers[f"{name}.semilog.dat"] = partial(write_semilog, series=ranked)
    if settings.dump_segments:
        writers[f"{name}.segments.csv"] = partial(
            write_segments_csv, segments=segments
        )
    if settings.dump_series:
        writers[f"{name}.series.csv"] = partial(
            write_series_csv, source_id=doc.source_id, name=name, values=lts.values
        )
    return ClassAnalysis(report=ClassReport(**report), writers=writers)


def analyze_words(
    doc: CleanDocument, settings: Settings, refuse: bool = False
) -> tuple[WordReport, Writers]:
    """Tokenize, count and rank words, and fit the Zipf exponent.

    Args:
        doc: The cleaned document.
        settings: Supplies the Zipf window and dump switches.
        refuse: Raise fit refusals instead of recording them in the report.
    """
    window = settings.zipf_window()
    tokens = tokenize_words(doc)
    if not tokens:
        logger.warning("%s: no words found", doc.source_id)
        return WordReport(token_count=0, vocabulary_size=0, zipf_error="no words"), {}

    table = build_word_frequency_table(tokens)
    ranked = zipf_rank(table, label=f"{doc.source_id}/{WORDS_STEM}")
    logger.info(
        "%s: %d tokens, %d word types",
        doc.source_id,
        table.total_tokens,
        table.vocabulary_size,
    )
    report = WordReport(
        token_count=table.total_tokens,
        vocabulary_size=table.vocabulary_size,
        top_words=[
            WordCount(rank=item.rank, word=item.key or "", frequency=int(item.value))
            for item in ranked.items[:TOP_WORDS]
        ],
    )
    try:
        fit = fit_power_law(ranked, window)
    except FIT_REFUSALS as e:
        if refuse:
            raise
        logger.warning("%s: Zipf fit refused: %s", ranked.label, e)
        report = report.model_copy(update={"zipf_error": str(e)})
    else:
        report = report.model_copy(update={"zipf": FitRecord.from_fit(WORDS_STEM, fit)})

    writers: Writers = {
        f"{WORDS_STEM}.csv": partial(write_rank_csv, series=ranked, with_keys=True),
        f"{WORDS_STEM}.loglog.dat": partial(write_loglog, series=ranked),
    }
    if settings.dump_series:
        fts = build_fts(tokens, table)
        writers[f"{WORDS_STEM}.fts.csv"] = partial(
            write_series_csv, source_id=doc.source_id, name="fts", values=fts.values
        )
    return report, writers


def mark_ratio(counts: dict[MarkClass, int]) -> float | None:
    """(dot + comma) / (colon + semicolon + exclamation + question)."""
    major = counts[MarkClass.DOT] + counts[MarkClass.COMMA]
    minor = sum(
        counts[mark_class]
        for mark_class in (
            MarkClass.COLON,
            MarkClass.SEMICOLON,
            MarkClass.EXCLAMATION,
            MarkClass.QUESTION,
        )
    )
    return major / minor if minor else None


def analyze(
    path: Path, settings: Settings, source_id: str | None = None
) -> AnalysisReport:
    """Run the full pipeline on one file and write its output directory.

    Raises:
        StageError: A stage failed; nothing is written in that case.
    """
    doc = prepare_document(path, settings, source_id)
    counts = count_marks(doc)
    classes: list[ClassReport] = []
    writers: Writers = {}
    for mark_class in settings.classes:
        with stage(f"segment:{mark_class.value}"):
            result = analyze_class(doc, mark_class, counts[mark_class], settings)
        classes.append(result.report)
        writers.update(result.writers)
    with stage(WORDS_STEM):
        words, word_writers = analyze_words(doc, settings)
    writers.update(word_writers)

    report = AnalysisReport(
        source_id=doc.source_id,
        preprocessing=list(doc.normalization_log),
        mark_ratio=mark_ratio(counts),
        classes=classes,
        words=words,
    )
    writers[REPORT_FILE] = partial(write_json, model=report)
    write_atomically(
        settings.output_dir / doc.source_id, writers, stale=analysis_outputs()
    )
    return report


def run_zipf(
    path: Path, settings: Settings, source_id: str | None = None
) -> WordReport:
    """Word-only pipeline: frequency ranks, plot data and the Zipf fit.

    Raises:
        StageError: A stage failed, including a refused fit (stage ``zipf``).
    """
    doc = prepare_document(path, settings, source_id)
    with stage("zipf"):
        report, writers = analyze_words(doc, settings, refuse=True)
    if report.zipf is None:
        raise StageError("zipf", PunktError(report.zipf_error or "no fit"))
    writers[ZIPF_FILE] = partial(write_json, model=report)
    write_atomically(settings.output_dir / doc.source_id, writers)
    return report


def unique_source_ids(paths: Sequence[Path]) -> list[str]:
    """File stems, with ``-2``, ``-3``... appended to repeats."""
    seen: dict[str, int] = {}
    ids = []
    for path in paths:
        stem = path.stem
        seen[stem] = seen.get(stem, 0) + 1
        ids.append(stem if seen[stem] == 1 else f"{stem}-{seen[stem]}")
    return ids


def _exponent(report: ClassReport | None) -> float | None:
    if report is None or report.power_law is None:
        return None
    return report.power_law.params["exponent"]


def compare_reports(
    reports: Sequence[AnalysisReport], classes: Sequence[MarkClass]
) -> ComparisonReport:
    sources = [report.source_id for report in reports]
    by_class = [{row.mark_class: row for row in report.classes} for report in reports]

    rows = []
    for mark_class in classes:
        per_source = [rows_of.get(mark_class) for rows_of in by_class]
        exponents = [_exponent(row) for row in per_source]
        differences: dict[str, float | None] = {}
        for i, first in enumerate(sources):
            for j in range(i + 1, len(sources)):
                a, b = exponents[i], exponents[j]
                differences[f"{first}-{sources[j]}"] = (
                    None if a is None or b is None else a - b
                )
        rows.append(
            ClassComparison(
                mark_class=mark_class,
                exponents=exponents,
                rank1_lengths=[row.rank1_length if row else None for row in per_source],
                mark_counts=[row.mark_count if row else 0 for row in per_source],
                exponent_differences=differences,
            )
        )

    at_least_first = []
    for rows_of in by_class:
        hits = 0
        for mark_class in SINGLE_MARK_CLASSES:
            first, other = by_class[0].get(mark_class), rows_of.get(mark_class)
            if (
                first is not None
                and other is not None
                and first.rank1_length is not None
                and other.rank1_length is not None
                and other.rank1_length >= first.rank1_length
            ):
                hits += 1
        at_least_first.append(hits)

    return ComparisonReport(
        sources=sources,
        classes=rows,
        zipf_exponents=[
            report.words.zipf.params["exponent"]
            if report.words is not None and report.words.zipf is not None
            else None
            for report in reports
        ],
        rank1_at_least_first=at_least_first,
    )


def compare(
    paths: Sequence[Path], settings: Settings, jobs: int = 1
) -> ComparisonReport:
    """Analyze every file and tabulate the results side by side.

    With ``jobs > 1`` the files are analyzed in a pool of worker processes.
    Every file writes to its own directory. The first failure aborts.
    """
    if len(paths) < 2:
        raise PunktError("compare needs at least two input files")
    source_ids = unique_source_ids(paths)
    tasks = [
        (path, settings, source_id)
        for path, source_id in zip(paths, source_ids, strict=True)
    ]
    if jobs > 1:
        logger.info("Analyzing %d files with %d workers", len(paths), jobs)
        with Pool(min(jobs, len(paths))) as pool:
            reports = pool.starmap(analyze, tasks)
    else:
        reports = [analyze(*task) for task in tasks]

    comparison = compare_reports(reports, settings.classes)
    write_atomically(
        settings.output_dir,
        {COMPARISON_FILE: partial(write_json, model=comparison)},
    )
    return comparison
