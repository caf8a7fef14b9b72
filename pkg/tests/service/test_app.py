"""Unit tests for the service app module."""

import csv
import json
import math
import os
from collections.abc import Callable
from pathlib import Path

import pytest

from punkt.framework.corpus.corpus import CleanDocument
from punkt.framework.errors import StageError
from punkt.framework.fitting.fitting import fit_power_law
from punkt.framework.ranking.ranking import rank_descending
from punkt.framework.segmentation.segmentation import MarkClass
from punkt.service.app import (
    analyze,
    analyze_class,
    compare,
    compare_reports,
    configure_logging,
    mark_ratio,
    prepare_document,
    run_zipf,
    unique_source_ids,
)
from punkt.service.reports import (
    AnalysisReport,
    ClassReport,
    dump_json,
    write_atomically,
)
from punkt.service.settings import Settings


@pytest.fixture
def settings(tmp_path: Path) -> Settings:
    return Settings(output_dir=tmp_path / "out")


def read_rank_csv(path: Path) -> list[tuple[int, int, int]]:
    with path.open(encoding="utf-8", newline="") as f:
        return [
            (int(row["rank"]), int(row["value"]), int(row["origin"]))
            for row in csv.DictReader(f)
        ]


def write_text(text: str) -> Callable[[Path], None]:
    def writer(path: Path) -> None:
        path.write_text(text)

    return writer


def fail(path: Path) -> None:
    raise OSError(f"disk full writing {path.name}")


class TestConfigureLogging:
    """Tests for the configure_logging function."""

    def test_configure_logging_does_not_raise(self) -> None:
        """Test that configure_logging does not raise an exception."""
        configure_logging()

    def test_configure_logging_can_be_called_multiple_times(self) -> None:
        """Test that configure_logging can be called multiple times."""
        configure_logging("DEBUG")
        configure_logging("warning")


class TestPrepareDocument:
    """Tests for prepare_document."""

    def test_runs_every_cleaning_step(self, tmp_path: Path, settings: Settings) -> None:
        """Test that boilerplate, headings and layout are removed."""
        path = tmp_path / "alice.txt"
        path.write_bytes(
            b"Preamble\r\n*** START OF THE PROJECT GUTENBERG EBOOK X ***\r\n"
            b"CHAPTER I. Down the Rabbit-Hole\r\nAlice was\r\nbeginning.\r\n"
            b"*** END OF THE PROJECT GUTENBERG EBOOK X ***\r\n"
        )

        doc = prepare_document(path, settings)

        assert doc.content == "Alice was beginning."
        assert doc.source_id == "alice"
        assert [r.name for r in doc.normalization_log] == [
            "strip_boilerplate",
            "strip_chapter_heads",
            "compose_unicode",
            "remove_carriage_returns",
            "newlines_to_blanks",
            "collapse_blanks",
        ]

    def test_steps_can_be_disabled(self, tmp_path: Path) -> None:
        """Test that disabled steps leave their input alone."""
        path = tmp_path / "raw.txt"
        path.write_text("CHAPTER I.\n*** START OF THE PROJECT GUTENBERG EBOOK X ***\n")
        settings = Settings(strip_boilerplate=False, strip_heads=False)

        doc = prepare_document(path, settings)

        assert doc.content.startswith("CHAPTER I. ***")

    def test_failure_names_the_stage(self, tmp_path: Path, settings: Settings) -> None:
        """Test that a failing step is reported with its stage."""
        path = tmp_path / "half.txt"
        path.write_text("*** START OF THE PROJECT GUTENBERG EBOOK X ***\nbody\n")

        with pytest.raises(StageError) as exc_info:
            prepare_document(path, settings)

        assert exc_info.value.stage == "strip_boilerplate"

    def test_decode_failure_is_a_load_error(
        self, tmp_path: Path, settings: Settings
    ) -> None:
        """Test that invalid UTF-8 fails in the load stage."""
        path = tmp_path / "latin1.txt"
        path.write_bytes("Café".encode("latin-1"))

        with pytest.raises(StageError) as exc_info:
            prepare_document(path, settings)

        assert exc_info.value.stage == "load"
        assert exc_info.value.cause.offset == 3


class TestAnalyze:
    """Tests for analyze."""

    def test_tiny_file(self, hi_file: Path, settings: Settings) -> None:
        """Test counts on "Hi. Bye. Hi." and the recorded fit refusal."""
        report = analyze(hi_file, settings)

        dot = next(c for c in report.classes if c.mark_class is MarkClass.DOT)
        assert dot.segment_count == 3
        assert dot.mark_count == 3
        assert dot.rank1_length == 3
        assert dot.power_law is None
        assert "fewer than 3 in-window points" in (dot.power_law_error or "")
        assert report.words is not None
        assert report.words.vocabulary_size == 2
        assert report.words.token_count == 3
        assert report.words.top_words[0].word == "hi"
        assert report.mark_ratio is None

    def test_writes_output_layout(self, story_file: Path, settings: Settings) -> None:
        """Test the per-source output directory."""
        analyze(story_file, settings)

        out = settings.output_dir / "story"
        for mark_class in MarkClass:
            assert (out / f"{mark_class.value}.csv").is_file()
            assert (out / f"{mark_class.value}.loglog.dat").is_file()
        assert (out / "report.json").is_file()
        assert (out / "words.csv").read_text().startswith("rank,value,origin,word\n")
        assert not (out / "dot.segments.csv").exists()
        assert [p.name for p in settings.output_dir.iterdir()] == ["story"]

    def test_report_statistics(self, story_file: Path, settings: Settings) -> None:
        """Test that class statistics agree with the rank dump."""
        report = analyze(story_file, settings)

        for row in report.classes:
            out = settings.output_dir / "story"
            rows = read_rank_csv(out / f"{row.mark_class}.csv")
            lengths = [value for _, value, _ in rows]
            assert row.segment_count == len(rows)
            assert row.rank1_length == lengths[0] == row.max_length
            assert row.total_length == sum(lengths)
            assert row.distinct_lengths == len(set(lengths))
            assert row.power_law is not None

    def test_refit_from_dump_matches_report(
        self, story_file: Path, settings: Settings
    ) -> None:
        """Test that fitting the dumped ranks reproduces the exponent."""
        report = analyze(story_file, settings)
        dot = next(c for c in report.classes if c.mark_class is MarkClass.DOT)
        assert dot.power_law is not None

        rows = read_rank_csv(settings.output_dir / "story" / "dot.csv")
        series = rank_descending([(origin, value) for _, value, origin in rows])
        refit = fit_power_law(series, dot.power_law.window)

        assert abs(refit.exponent - dot.power_law.params["exponent"]) <= 1e-12

    def test_loglog_matches_ranks(self, story_file: Path, settings: Settings) -> None:
        """Test that plot data holds log10 rank and value pairs."""
        analyze(story_file, settings)
        out = settings.output_dir / "story"

        rows = read_rank_csv(out / "comma.csv")
        pairs = [
            tuple(float(x) for x in line.split())
            for line in (out / "comma.loglog.dat").read_text().splitlines()
        ]

        assert len(pairs) == len(rows)
        assert pairs[0][0] == 0.0
        assert pairs[0][1] == pytest.approx(math.log10(rows[0][1]))

    def test_reproducible_outputs(self, story_file: Path, tmp_path: Path) -> None:
        """Test that two runs write byte-identical files."""
        first = Settings(output_dir=tmp_path / "first")
        second = Settings(output_dir=tmp_path / "second")

        analyze(story_file, first)
        analyze(story_file, second)

        names = sorted(p.name for p in (first.output_dir / "story").iterdir())
        assert names == sorted(p.name for p in (second.output_dir / "story").iterdir())
        for name in names:
            assert (first.output_dir / "story" / name).read_bytes() == (
                second.output_dir / "story" / name
            ).read_bytes()

    def test_report_json_round_trips(
        self, story_file: Path, settings: Settings
    ) -> None:
        """Test that parsing and re-serializing the report is the identity."""
        analyze(story_file, settings)
        text = (settings.output_dir / "story" / "report.json").read_text()

        assert dump_json(AnalysisReport.model_validate_json(text)) == text

    def test_optional_analyses_and_dumps(
        self, story_file: Path, tmp_path: Path
    ) -> None:
        """Test the stretched fit, break estimate and dump files."""
        settings = Settings(
            output_dir=tmp_path / "out",
            classes="dot",
            stretched=True,
            breaks=True,
            dump_segments=True,
            dump_series=True,
        )

        report = analyze(story_file, settings)

        dot = report.classes[0]
        assert dot.stretched is not None or dot.stretched_error
        if dot.stretched is not None:
            assert dot.preferred_model in {"power_law", "stretched_exponential"}
            assert dot.stretched.window == dot.power_law.window
        assert dot.break_estimate is not None or dot.break_error
        out = settings.output_dir / "story"
        assert (out / "dot.segments.csv").read_text().startswith(
            "ordinal,start,end,terminator,length\n"
        )
        series_lines = (out / "dot.series.csv").read_text().splitlines()
        assert series_lines[0] == "# source_id=story class=dot"
        assert series_lines[1] == "ordinal,value"
        assert len(series_lines) - 2 == dot.segment_count
        assert (out / "words.fts.csv").is_file()
        semilog = (out / "dot.semilog.dat").read_text().splitlines()
        assert len(semilog) == dot.segment_count
        rank, log_value = semilog[0].split()
        assert rank == "1"
        assert float(log_value) == pytest.approx(math.log10(dot.rank1_length))

    def test_rerun_removes_files_of_dropped_classes(
        self, story_file: Path, settings: Settings
    ) -> None:
        """Test that a narrower rerun leaves only files its report describes."""
        analyze(story_file, settings.model_copy(update={"dump_segments": True}))
        out = settings.output_dir / "story"
        (out / "notes.txt").write_text("mine")

        report = analyze(
            story_file, settings.model_copy(update={"classes": [MarkClass.SEMICOLON]})
        )

        assert [row.mark_class for row in report.classes] == [MarkClass.SEMICOLON]
        assert sorted(p.name for p in out.iterdir()) == [
            "notes.txt",
            "report.json",
            "semicolon.csv",
            "semicolon.loglog.dat",
            "words.csv",
            "words.loglog.dat",
        ]
        assert [p.name for p in settings.output_dir.iterdir()] == ["story"]

    def test_failure_writes_nothing(self, tmp_path: Path, settings: Settings) -> None:
        """Test that a failed analysis leaves no partial output."""
        path = tmp_path / "half.txt"
        path.write_text("*** START OF THE PROJECT GUTENBERG EBOOK X ***\nbody.\n")

        with pytest.raises(StageError):
            analyze(path, settings)

        assert not settings.output_dir.exists()


class TestWriteAtomically:
    """Tests for write_atomically."""

    def test_writes_every_file(self, tmp_path: Path) -> None:
        """Test that a new directory receives all files."""
        target = tmp_path / "out" / "doc"

        written = write_atomically(
            target, {"a.csv": write_text("a"), "b.csv": write_text("b")}
        )

        assert written == [target / "a.csv", target / "b.csv"]
        assert (target / "b.csv").read_text() == "b"
        assert [p.name for p in target.parent.iterdir()] == ["doc"]

    def test_failed_writer_creates_no_directory(self, tmp_path: Path) -> None:
        """Test that a writer failure leaves no new target behind."""
        target = tmp_path / "out" / "doc"

        with pytest.raises(StageError) as exc_info:
            write_atomically(target, {"a.csv": write_text("a"), "b.csv": fail})

        assert exc_info.value.stage == "write"
        assert list(target.parent.iterdir()) == []

    def test_failed_writer_keeps_existing_files(self, tmp_path: Path) -> None:
        """Test that earlier output survives a failed rewrite."""
        target = tmp_path / "doc"
        write_atomically(target, {"a.csv": write_text("old")})

        with pytest.raises(StageError):
            write_atomically(
                target, {"a.csv": write_text("new"), "b.csv": fail}, stale=["a.csv"]
            )

        assert (target / "a.csv").read_text() == "old"
        assert [p.name for p in tmp_path.iterdir()] == ["doc"]

    def test_failed_move_restores_previous_files(
        self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        """Test that a move failing halfway puts the old files back."""
        target = tmp_path / "doc"
        write_atomically(
            target, {"a.csv": write_text("old a"), "c.csv": write_text("old c")}
        )
        replace = os.replace

        def flaky_replace(src: Path, dst: Path) -> None:
            if Path(dst) == target / "b.csv":
                raise OSError("device busy")
            replace(src, dst)

        monkeypatch.setattr(os, "replace", flaky_replace)

        with pytest.raises(StageError):
            write_atomically(
                target,
                {"a.csv": write_text("new a"), "b.csv": write_text("new b")},
                stale=["c.csv"],
            )

        assert (target / "a.csv").read_text() == "old a"
        assert (target / "c.csv").read_text() == "old c"
        assert not (target / "b.csv").exists()

    def test_stale_files_are_removed(self, tmp_path: Path) -> None:
        """Test that named leftovers go and unnamed files stay."""
        target = tmp_path / "doc"
        write_atomically(
            target, {"a.csv": write_text("a"), "old.csv": write_text("old")}
        )
        (target / "keep.txt").write_text("keep")

        write_atomically(target, {"a.csv": write_text("a2")}, stale=["old.csv"])

        assert sorted(p.name for p in target.iterdir()) == ["a.csv", "keep.txt"]
        assert (target / "a.csv").read_text() == "a2"


class TestAnalyzeClass:
    """Tests for analyze_class."""

    def test_class_without_segments(self, settings: Settings) -> None:
        """Test that no segments gives an empty report and no files."""
        doc = CleanDocument(source_id="marks", content="... .")

        result = analyze_class(doc, MarkClass.DOT, 2, settings)

        assert result.report.segment_count == 0
        assert result.report.mark_count == 2
        assert result.report.power_law is None
        assert result.writers == {}


class TestRunZipf:
    """Tests for run_zipf."""

    def test_zipfian_text(self, zipf_file: Path, settings: Settings) -> None:
        """Test the exponent and files of a text built with f ~ 1/R."""
        report = run_zipf(zipf_file, settings)

        assert report.zipf is not None
        assert 0.85 <= report.zipf.params["exponent"] <= 1.15
        assert report.zipf.window.r_max == report.vocabulary_size == 60
        assert report.top_words[0].word == "w1"
        out = settings.output_dir / "zipfian"
        assert json.loads((out / "zipf.json").read_text())["vocabulary_size"] == 60
        assert (out / "words.loglog.dat").is_file()
        assert not (out / "report.json").exists()

    def test_single_word_is_refused(self, tmp_path: Path, settings: Settings) -> None:
        """Test that one repeated word cannot be fitted."""
        path = tmp_path / "echo.txt"
        path.write_text("echo echo echo echo echo")

        with pytest.raises(StageError, match="fewer than 3 in-window points") as exc:
            run_zipf(path, settings)

        assert exc.value.stage == "zipf"
        assert not settings.output_dir.exists()


class TestCompare:
    """Tests for compare and its helpers."""

    def test_self_comparison_differences_are_zero(
        self, story_file: Path, settings: Settings
    ) -> None:
        """Test that a file compared with itself differs by exactly 0."""
        report = compare([story_file, story_file], settings)

        assert report.sources == ["story", "story-2"]
        for row in report.classes:
            assert row.exponent_differences == {"story-story-2": 0.0}
        assert report.rank1_at_least_first == [6, 6]
        assert (settings.output_dir / "comparison.json").is_file()
        assert (settings.output_dir / "story-2" / "report.json").is_file()

    def test_parallel_matches_sequential(
        self, story_file: Path, hi_file: Path, tmp_path: Path
    ) -> None:
        """Test that worker processes give the same comparison."""
        sequential = compare(
            [story_file, hi_file], Settings(output_dir=tmp_path / "seq")
        )
        parallel = compare(
            [story_file, hi_file], Settings(output_dir=tmp_path / "par"), jobs=2
        )

        assert parallel == sequential

    def test_worker_failure_names_the_stage(
        self, story_file: Path, tmp_path: Path
    ) -> None:
        """Test that a failure inside a worker process reaches the caller."""
        empty = tmp_path / "empty.txt"
        empty.write_bytes(b"")

        with pytest.raises(StageError) as exc_info:
            compare([story_file, empty], Settings(output_dir=tmp_path / "out"), jobs=2)

        assert exc_info.value.stage == "load"

    def test_unique_source_ids(self) -> None:
        """Test that repeated stems get numeric suffixes."""
        paths = [Path("a/x.txt"), Path("b/x.txt"), Path("y.txt"), Path("c/x.md")]

        assert unique_source_ids(paths) == ["x", "x-2", "y", "x-3"]

    def test_rank1_counts_against_first_source(self) -> None:
        """Test the count of classes at or above the first source's rank-1."""

        def report(source_id: str, rank1: dict[MarkClass, int]) -> AnalysisReport:
            return AnalysisReport(
                source_id=source_id,
                preprocessing=[],
                classes=[
                    ClassReport(
                        mark_class=mark_class,
                        mark_count=1,
                        segment_count=1,
                        rank1_length=length,
                    )
                    for mark_class, length in rank1.items()
                ],
            )

        first = report("eng", {MarkClass.DOT: 100, MarkClass.COMMA: 50})
        second = report("esp", {MarkClass.DOT: 120, MarkClass.COMMA: 40})

        comparison = compare_reports([first, second], [MarkClass.DOT, MarkClass.COMMA])

        assert comparison.rank1_at_least_first == [2, 1]
        assert comparison.classes[0].exponent_differences == {"eng-esp": None}
        assert comparison.zipf_exponents == [None, None]


class TestMarkRatio:
    """Tests for mark_ratio."""

    def test_ratio(self) -> None:
        """Test (dot + comma) over the other single marks."""
        counts = dict.fromkeys(MarkClass, 1)
        counts[MarkClass.DOT] = 30
        counts[MarkClass.COMMA] = 10

        assert mark_ratio(counts) == 10.0

    def test_no_minor_marks(self) -> None:
        """Test that a zero denominator gives None."""
        counts = dict.fromkeys(MarkClass, 0)
        counts[MarkClass.DOT] = 4

        assert mark_ratio(counts) is None


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
