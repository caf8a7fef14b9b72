"""Command-line front end.

Exit codes: 0 when every requested analysis completed, 1 when a pipeline stage
failed, 2 for usage and configuration errors.
"""

import argparse
import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from punkt.framework.errors import ConfigError, PunktError, StageError
from punkt.framework.segmentation.segmentation import MarkClass
from punkt.service.app import analyze, compare, configure_logging, run_zipf
from punkt.service.reports import format_comparison, format_summary
from punkt.service.settings import Settings, load_settings, render_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

CLASS_CHOICES = [mark_class.value for mark_class in MarkClass] + ["all"]


def _common_options() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--out", type=Path, help="output directory")
    parser.add_argument("--config", type=Path, help="config file (key = value)")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")
    parser.add_argument(
        "--show-config",
        action="store_true",
        help="print the effective settings as a config file and exit",
    )
    parser.add_argument("--fit-min", type=int, help="first rank of the fit window")
    parser.add_argument("--fit-max", type=int, help="last rank of the fit window")
    parser.add_argument(
        "--no-boilerplate",
        dest="strip_boilerplate",
        action="store_false",
        default=None,
        help="do not strip distribution header and footer",
    )
    parser.add_argument(
        "--no-strip-heads",
        dest="strip_heads",
        action="store_false",
        default=None,
        help="keep chapter heading lines",
    )
    parser.add_argument(
        "--dump-series",
        action="store_true",
        default=None,
        help="also write the length and frequency time series",
    )
    return parser


def _class_options() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument(
        "--class",
        dest="classes",
        choices=CLASS_CHOICES,
        help="mark class to analyze (default: all)",
    )
    parser.add_argument(
        "--stretched",
        action="store_true",
        default=None,
        help="also fit a stretched exponential",
    )
    parser.add_argument(
        "--breaks", action="store_true", default=None, help="estimate break ranks"
    )
    parser.add_argument(
        "--dump-segments",
        action="store_true",
        default=None,
        help="also write the segment spans of each class",
    )
    return parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="punkt",
        description="Punctuation-segment and word rank statistics of plain texts.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    common, classes = _common_options(), _class_options()

    analyze_parser = subparsers.add_parser(
        "analyze", parents=[common, classes], help="analyze one text"
    )
    analyze_parser.add_argument("file", type=Path, nargs="?")

    compare_parser = subparsers.add_parser(
        "compare", parents=[common, classes], help="analyze texts side by side"
    )
    compare_parser.add_argument("files", type=Path, nargs="*")
    compare_parser.add_argument(
        "--jobs", type=int, default=1, help="worker processes (default: 1)"
    )

    zipf_parser = subparsers.add_parser(
        "zipf", parents=[common], help="word frequency ranks of one text"
    )
    zipf_parser.add_argument("file", type=Path, nargs="?")
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    """Settings values for the flags that were given."""
    overrides: dict[str, Any] = {
        "output_dir": args.out,
        "log_level": args.log_level,
        "strip_boilerplate": args.strip_boilerplate,
        "strip_heads": args.strip_heads,
        "dump_series": args.dump_series,
    }
    if args.command == "zipf":
        overrides["zipf_fit_min"] = args.fit_min
        overrides["zipf_fit_max"] = args.fit_max
    else:
        overrides["classes"] = args.classes
        overrides["fit_min"] = args.fit_min
        if args.fit_max is not None:
            overrides["fit_max"] = dict.fromkeys(MarkClass, args.fit_max)
        overrides["stretched"] = args.stretched
        overrides["breaks"] = args.breaks
        overrides["dump_segments"] = args.dump_segments
    return {key: value for key, value in overrides.items() if value is not None}


def _run(args: argparse.Namespace, settings: Settings) -> None:
    if args.command == "analyze":
        print(format_summary(analyze(args.file, settings)))
    elif args.command == "compare":
        print(format_comparison(compare(args.files, settings, jobs=args.jobs)))
    else:
        report = run_zipf(args.file, settings)
        assert report.zipf is not None
        print(
            f"words: {report.token_count} tokens, {report.vocabulary_size} types\n"
            f"zeta = {report.zipf.params['exponent']:.4f} "
            f"(R^2 = {report.zipf.r_squared:.4f}, "
            f"ranks {report.zipf.window.r_min}-{report.zipf.window.r_max})"
        )


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    try:
        settings = load_settings(args.config, _overrides(args))
    except ConfigError as e:
        configure_logging(args.log_level or "INFO")
        logger.error("Configuration error: %s", e)
        return EXIT_USAGE
    configure_logging(settings.log_level)

    if args.show_config:
        print(render_config(settings), end="")
        return EXIT_OK

    if args.command == "compare":
        if len(args.files) < 2:
            logger.error("compare needs at least two input files")
            return EXIT_USAGE
        if args.jobs < 1:
            logger.error("--jobs must be at least 1")
            return EXIT_USAGE
    elif args.file is None:
        logger.error("%s needs an input file", args.command)
        return EXIT_USAGE

    try:
        _run(args, settings)
    except StageError as e:
        logger.error("Stage %s failed: %s", e.stage, e.cause)
        return EXIT_FAILURE
    except PunktError as e:
        logger.error("Analysis failed: %s", e)
        return EXIT_FAILURE
    return EXIT_OK
