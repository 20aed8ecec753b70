"""Layered settings: CLI flag > GENIUS_* env var > config file > default.

The config file is flat, stringly ``key = value`` lines (quotes optional,
'#' comments); keys use the flag spelling, e.g. ``embedder-endpoint``.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Callable, TypeVar

from .errors import ConfigError

ENV_PREFIX = "GENIUS_"
DEFAULT_CONFIG_NAME = "genius.toml"

T = TypeVar("T")


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    values: dict[str, str] = {}
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}: line {line_no} is not 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError(f"{source}: line {line_no} has an empty key")
        if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
            value = value[1:-1]
        values[key] = value
    return values


def load_config_file(path: Path) -> dict[str, str]:
    try:
        return parse_config_text(path.read_text(encoding="utf-8"), str(path))
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc


class Settings:
    """Resolves one option through the flag/env/file/default layers."""

    def __init__(self, config_path: str | Path | None = None) -> None:
        self._file: dict[str, str] = {}
        if config_path is not None:
            self._file = load_config_file(Path(config_path))
        elif Path(DEFAULT_CONFIG_NAME).is_file():
            self._file = load_config_file(Path(DEFAULT_CONFIG_NAME))

    def get(
        self,
        key: str,
        flag_value: T | None,
        default: T | None = None,
        cast: Callable[[str], T] = str,  # type: ignore[assignment]
    ) -> T | None:
        if flag_value is not None:
            return flag_value
        env_key = ENV_PREFIX + key.replace("-", "_").upper()
        raw = os.environ.get(env_key)
        source = env_key
        if raw is None:
            raw = self._file.get(key)
            source = f"config key {key!r}"
        if raw is None:
            return default
        try:
            return cast(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{source}: cannot parse {raw!r} ({exc})") from exc
