"""Application settings with file- and flag-based configuration.

Settings are resolved in the following order (later overrides earlier):

1. Default values of the ``Settings`` model.
2. A config file, named by ``--config`` or the ``PUNKT_CONFIG`` environment
   variable.
3. Command-line flags.

The config file holds ``key = value`` lines. ``#`` starts a comment line,
repeating ``heading_patterns`` appends another pattern, and a dotted key sets
one entry of a mapping (``fit_max.semicolon = 50``).
"""

import logging
import os
from functools import lru_cache
from pathlib import Path
from typing import Any

import regex
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from punkt.framework.corpus.corpus import (
    DEFAULT_END_MARKER,
    DEFAULT_HEADING_PATTERNS,
    DEFAULT_START_MARKER,
    MarkerConfig,
    NormalizationOptions,
)
from punkt.framework.errors import ConfigError
from punkt.framework.fitting.models import FitWindow
from punkt.framework.segmentation.segmentation import MarkClass

logger = logging.getLogger(__name__)

CONFIG_ENV_VAR = "PUNKT_CONFIG"

# Keys that may be repeated in a config file, each line adding one item.
LIST_KEYS = frozenset({"heading_patterns"})

DEFAULT_FIT_MAX: dict[MarkClass, int] = {
    MarkClass.DOT: 500,
    MarkClass.COMMA: 500,
    MarkClass.COLON: 50,
    MarkClass.SEMICOLON: 50,
    MarkClass.EXCLAMATION: 100,
    MarkClass.QUESTION: 100,
    MarkClass.UNIT_OF_THOUGHT: 500,
}


class Settings(BaseModel):
    """Every tunable default of the toolkit."""

    model_config = ConfigDict(extra="forbid")

    # Logging settings
    log_level: str = Field(default="INFO")

    # Output
    output_dir: Path = Field(default=Path("punkt-out"))
    dump_segments: bool = False
    dump_series: bool = False

    # Preprocessing
    strip_boilerplate: bool = True
    start_marker: str = DEFAULT_START_MARKER
    end_marker: str = DEFAULT_END_MARKER
    strip_heads: bool = True
    heading_patterns: list[str] = Field(
        default_factory=lambda: list(DEFAULT_HEADING_PATTERNS)
    )
    compose_unicode: bool = True
    remove_carriage_returns: bool = True
    newlines_to_blanks: bool = True
    collapse_blanks: bool = True

    # Analyses
    classes: list[MarkClass] = Field(default_factory=lambda: list(MarkClass))
    fit_min: int = Field(default=5, ge=1)
    fit_max: dict[MarkClass, int] = Field(
        default_factory=lambda: dict(DEFAULT_FIT_MAX)
    )
    zipf_fit_min: int = Field(default=10, ge=1)
    zipf_fit_max: int = 1000
    stretched: bool = False
    breaks: bool = False

    @field_validator("classes", mode="before")
    @classmethod
    def _split_classes(cls, value: Any) -> Any:
        if isinstance(value, str):
            names = [name.strip() for name in value.split(",") if name.strip()]
            return list(MarkClass) if names == ["all"] else names
        return value

    @field_validator("start_marker", "end_marker", "heading_patterns", mode="after")
    @classmethod
    def _check_patterns(cls, value: str | list[str]) -> str | list[str]:
        for pattern in [value] if isinstance(value, str) else value:
            try:
                regex.compile(pattern)
            except regex.error as e:
                raise ValueError(f"invalid pattern {pattern!r}: {e}") from e
        return value

    @field_validator("fit_max", mode="after")
    @classmethod
    def _complete_fit_max(cls, value: dict[MarkClass, int]) -> dict[MarkClass, int]:
        return {**DEFAULT_FIT_MAX, **value}

    @model_validator(mode="after")
    def _check_windows(self) -> "Settings":
        for mark_class in self.classes:
            if self.fit_min >= self.fit_max[mark_class]:
                raise ValueError(
                    f"fit_min {self.fit_min} must be below fit_max "
                    f"{self.fit_max[mark_class]} for class {mark_class.value}"
                )
        if self.zipf_fit_min >= self.zipf_fit_max:
            raise ValueError(
                f"zipf_fit_min {self.zipf_fit_min} must be below "
                f"zipf_fit_max {self.zipf_fit_max}"
            )
        return self

    def marker_config(self) -> MarkerConfig:
        return MarkerConfig(start_marker=self.start_marker, end_marker=self.end_marker)

    def normalization_options(self) -> NormalizationOptions:
        return NormalizationOptions(
            compose_unicode=self.compose_unicode,
            remove_carriage_returns=self.remove_carriage_returns,
            newlines_to_blanks=self.newlines_to_blanks,
            collapse_blanks=self.collapse_blanks,
        )

    def fit_window(self, mark_class: MarkClass) -> FitWindow:
        return FitWindow(r_min=self.fit_min, r_max=self.fit_max[mark_class])

    def zipf_window(self) -> FitWindow:
        return FitWindow(r_min=self.zipf_fit_min, r_max=self.zipf_fit_max)


def parse_config_text(text: str, origin: str = "<config>") -> dict[str, Any]:
    """Parse ``key = value`` lines into a dict suitable for ``Settings``."""
    values: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{origin}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = key.strip(), value.strip()
        if "." in key:
            parent, child = key.split(".", 1)
            values.setdefault(parent, {})[child] = value
        elif key in LIST_KEYS:
            values.setdefault(key, []).append(value)
        else:
            values[key] = value
    return values


def _load_config_file(path: Path) -> dict[str, Any]:
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    logger.debug("Loaded config file %s", path)
    return parse_config_text(text, origin=str(path))


def _merge(base: dict[str, Any], overrides: dict[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = {**merged[key], **value}
        else:
            merged[key] = value
    return merged


def load_settings(
    config_path: Path | None = None, overrides: dict[str, Any] | None = None
) -> Settings:
    """Build settings from defaults, a config file and flag overrides.

    Args:
        config_path: Explicit config file; must exist. When ``None`` the file
            named by ``PUNKT_CONFIG`` is used if it exists.
        overrides: Values from command-line flags; they win over the file.

    Raises:
        ConfigError: The file is missing, unreadable or holds invalid values.
    """
    values: dict[str, Any] = {}
    if config_path is not None:
        if not config_path.exists():
            raise ConfigError(f"config file not found: {config_path}")
        values = _load_config_file(config_path)
    elif env_path := os.environ.get(CONFIG_ENV_VAR):
        path = Path(env_path)
        if path.exists():
            values = _load_config_file(path)
        else:
            logger.warning(
                "%s names %s, which does not exist; using defaults",
                CONFIG_ENV_VAR,
                path,
            )

    values = _merge(values, overrides or {})
    try:
        return Settings(**values)
    except ValidationError as e:
        raise ConfigError(f"invalid configuration: {e}") from e


@lru_cache
def get_settings() -> Settings:
    """Settings from defaults and ``PUNKT_CONFIG`` only."""
    return load_settings()


def render_config(settings: Settings) -> str:
    """Render settings as a config file that ``load_settings`` reads back."""
    lines: list[str] = []
    for key, value in settings.model_dump(mode="json").items():
        if isinstance(value, list) and key in LIST_KEYS:
            lines.extend(f"{key} = {item}" for item in value)
        elif isinstance(value, list):
            lines.append(f"{key} = {', '.join(value)}")
        elif isinstance(value, dict):
            lines.extend(f"{key}.{child} = {item}" for child, item in value.items())
        elif isinstance(value, bool):
            lines.append(f"{key} = {str(value).lower()}")
        else:
            lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"
