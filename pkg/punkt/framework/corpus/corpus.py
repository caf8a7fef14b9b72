"""Document loading, cleaning and tokenization.

A document moves through three shapes:

1. ``RawDocument`` - the decoded file, exactly as read (``load_document``).
2. ``RawDocument`` again, cut down to the literary body (``strip_boilerplate``).
3. ``CleanDocument`` - heading lines removed (``strip_chapter_heads``) and the
   text normalized (``normalize_text``).

Every step appends a ``TransformRecord`` to ``normalization_log`` so a clean
document can be reproduced from its raw source.
"""

import logging
import unicodedata
from collections.abc import Sequence
from pathlib import Path

import regex
from pydantic import BaseModel, ConfigDict, model_validator

from punkt.framework.errors import (
    ConfigError,
    DocumentDecodeError,
    EmptyDocumentError,
    UnbalancedMarkersError,
)

logger = logging.getLogger(__name__)

# Project Gutenberg header/footer lines, old ("THIS") and new ("THE") wording.
DEFAULT_START_MARKER = r"^\*{3}\s*START OF (?:THE|THIS) PROJECT GUTENBERG EBOOK.*$"
DEFAULT_END_MARKER = r"^\*{3}\s*END OF (?:THE|THIS) PROJECT GUTENBERG EBOOK.*$"

DEFAULT_HEADING_PATTERNS: tuple[str, ...] = (
    r"^\s*CHAPTER\s+(?:[IVXLCDM]+|\d+)\b.*$",
    r"^\s*ĈAPITRO\b.*$",
)

# A word: letters, digits and apostrophes that sit between two letters.
WORD_RE = regex.compile(
    r"[\p{L}\p{M}\p{N}]+(?:(?<=[\p{L}\p{M}])['’](?=\p{L})[\p{L}\p{M}\p{N}]+)*"
)

# Esperanto x-system digraphs (cx, gx, hx, jx, sx, ux).
X_SYSTEM_RE = regex.compile(r"[cghjsu]x", regex.IGNORECASE)

BLANK_RUN_RE = regex.compile(r" {2,}")


class TransformRecord(BaseModel):
    """One entry of a document's normalization log."""

    model_config = ConfigDict(frozen=True)

    name: str
    count: int
    detail: str = ""


class RawDocument(BaseModel):
    """Decoded text as loaded from disk, before any normalization."""

    model_config = ConfigDict(frozen=True)

    source_id: str
    content: str
    byte_length: int
    normalization_log: tuple[TransformRecord, ...] = ()

    @model_validator(mode="after")
    def _check_byte_length(self) -> "RawDocument":
        encoded = len(self.content.encode("utf-8"))
        if encoded != self.byte_length:
            raise ValueError(
                f"byte_length {self.byte_length} does not match content ({encoded})"
            )
        return self


class CleanDocument(BaseModel):
    """Normalized text; the unit every analysis consumes."""

    model_config = ConfigDict(frozen=True)

    source_id: str
    content: str
    normalization_log: tuple[TransformRecord, ...] = ()


class Token(BaseModel):
    model_config = ConfigDict(frozen=True)

    surface: str
    folded: str
    ordinal: int


class MarkerConfig(BaseModel):
    """Line patterns delimiting the literary body of a distribution file."""

    model_config = ConfigDict(frozen=True)

    start_marker: str = DEFAULT_START_MARKER
    end_marker: str = DEFAULT_END_MARKER


class NormalizationOptions(BaseModel):
    """Independent switches for the transforms applied by ``normalize_text``."""

    model_config = ConfigDict(frozen=True)

    compose_unicode: bool = True
    remove_carriage_returns: bool = True
    newlines_to_blanks: bool = True
    collapse_blanks: bool = True


def load_document(
    source: str | Path | bytes, source_id: str | None = None
) -> RawDocument:
    """Load and strictly decode a UTF-8 document.

    Args:
        source: A file path, or the raw bytes themselves.
        source_id: Label for the document. Defaults to the file stem for paths
            and ``"document"`` for bytes.

    Raises:
        EmptyDocumentError: The input has zero length.
        DocumentDecodeError: The input is not valid UTF-8; ``offset`` names the
            first invalid byte.
    """
    if isinstance(source, bytes):
        data = source
        source_id = source_id or "document"
    else:
        path = Path(source)
        data = path.read_bytes()
        source_id = source_id or path.stem

    if not data:
        raise EmptyDocumentError(f"{source_id}: empty input is not analyzable")

    try:
        content = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise DocumentDecodeError(source_id, e.start, e.reason) from e

    logger.info(
        "Loaded %s (%d bytes, %d characters)", source_id, len(data), len(content)
    )
    return RawDocument(source_id=source_id, content=content, byte_length=len(data))


def _line_bounds(content: str, start: int, end: int) -> tuple[int, int]:
    """Return the offsets of the start of the line holding ``start`` and of the
    character after the newline that ends the line holding ``end``."""
    line_start = content.rfind("\n", 0, start) + 1
    newline = content.find("\n", end)
    line_end = len(content) if newline == -1 else newline + 1
    return line_start, line_end


def _compile(pattern: str, flags: int = 0) -> regex.Pattern[str]:
    try:
        return regex.compile(pattern, flags)
    except regex.error as e:
        raise ConfigError(f"invalid pattern {pattern!r}: {e}") from e


def strip_boilerplate(
    doc: RawDocument, markers: MarkerConfig | None = None
) -> RawDocument:
    """Keep only the text strictly between the start and end marker lines.

    A document with neither marker is returned unchanged; one with only one of
    them is rejected.
    """
    markers = markers or MarkerConfig()
    start_re = _compile(markers.start_marker, regex.MULTILINE)
    end_re = _compile(markers.end_marker, regex.MULTILINE)

    content = doc.content
    start_match = start_re.search(content)
    if start_match is None:
        if end_re.search(content) is not None:
            raise UnbalancedMarkersError(
                f"{doc.source_id}: unbalanced markers (end marker without start marker)"
            )
        logger.info("%s: no boilerplate markers found", doc.source_id)
        record = TransformRecord(name="strip_boilerplate", count=0, detail="no markers")
        return doc.model_copy(
            update={"normalization_log": (*doc.normalization_log, record)}
        )

    _, body_start = _line_bounds(content, start_match.start(), start_match.end())
    end_match = end_re.search(content, body_start)
    if end_match is None:
        raise UnbalancedMarkersError(
            f"{doc.source_id}: unbalanced markers (start marker without end marker)"
        )
    body_end, _ = _line_bounds(content, end_match.start(), end_match.end())

    # The newline ending the last body line belongs to the end-marker boundary.
    body = content[body_start:body_end].removesuffix("\n").removesuffix("\r")
    removed = len(content) - len(body)
    logger.info("%s: removed %d boilerplate characters", doc.source_id, removed)
    record = TransformRecord(
        name="strip_boilerplate", count=removed, detail="markers found"
    )
    return RawDocument(
        source_id=doc.source_id,
        content=body,
        byte_length=len(body.encode("utf-8")),
        normalization_log=(*doc.normalization_log, record),
    )


def strip_chapter_heads(
    doc: RawDocument | CleanDocument,
    heading_patterns: Sequence[str] = DEFAULT_HEADING_PATTERNS,
) -> CleanDocument:
    """Remove every line matching one of ``heading_patterns``, newline included."""
    if not heading_patterns:
        raise ConfigError("heading_patterns must not be empty")
    compiled = [_compile(pattern) for pattern in heading_patterns]

    kept: list[str] = []
    removed = 0
    for line in doc.content.split("\n"):
        bare = line.rstrip("\r")
        if any(pattern.match(bare) for pattern in compiled):
            removed += 1
            continue
        kept.append(line)

    logger.info("%s: removed %d heading lines", doc.source_id, removed)
    record = TransformRecord(
        name="strip_chapter_heads",
        count=removed,
        detail=f"{len(compiled)} patterns",
    )
    return CleanDocument(
        source_id=doc.source_id,
        content="\n".join(kept),
        normalization_log=(*doc.normalization_log, record),
    )


def _warn_on_x_system(doc: CleanDocument) -> None:
    hits = len(X_SYSTEM_RE.findall(doc.content))
    if hits:
        logger.warning(
            "%s: %d x-system digraphs (cx/gx/hx/jx/sx/ux) found; they are not "
            "transliterated and inflate character counts",
            doc.source_id,
            hits,
        )


def normalize_text(
    doc: RawDocument | CleanDocument, options: NormalizationOptions | None = None
) -> CleanDocument:
    """Apply the enabled transforms in a fixed order.

    Order: NFC composition, carriage-return removal, newline to blank, blank-run
    collapse. Each enabled transform logs its replacement count. No
    transliteration is performed.
    """
    options = options or NormalizationOptions()
    content = doc.content
    log = list(doc.normalization_log)

    if options.compose_unicode:
        composed = unicodedata.normalize("NFC", content)
        log.append(
            TransformRecord(name="compose_unicode", count=len(content) - len(composed))
        )
        content = composed
    if options.remove_carriage_returns:
        log.append(
            TransformRecord(name="remove_carriage_returns", count=content.count("\r"))
        )
        content = content.replace("\r", "")
    if options.newlines_to_blanks:
        log.append(
            TransformRecord(name="newlines_to_blanks", count=content.count("\n"))
        )
        content = content.replace("\n", " ")
    if options.collapse_blanks:
        content, runs = BLANK_RUN_RE.subn(" ", content)
        log.append(TransformRecord(name="collapse_blanks", count=runs))

    for record in log[len(doc.normalization_log) :]:
        logger.debug("%s: %s replaced %d", doc.source_id, record.name, record.count)

    clean = CleanDocument(
        source_id=doc.source_id, content=content, normalization_log=tuple(log)
    )
    _warn_on_x_system(clean)
    return clean


def tokenize_words(doc: CleanDocument) -> tuple[Token, ...]:
    """Split a document into word tokens.

    A word is a maximal run of letters and digits, with an apostrophe bound in
    only when a letter sits on both sides ("Alice's"). Everything else separates.
    """
    return tuple(
        Token(surface=surface, folded=surface.casefold(), ordinal=ordinal)
        for ordinal, surface in enumerate(WORD_RE.findall(doc.content))
    )
