"""Build configuration.

One plain-text key=value file configures a whole build; command-line flags
override file values, and environment variables prefixed with GRAPHFUSE_
override the file but not explicit flags.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional, Tuple

from .values import DEFAULT_NULL_CODES, FactorizationPolicy

ENV_PREFIX = "GRAPHFUSE_"

MATCHING_MODES = ("off", "entity", "full")
EXTRACTOR_OFF = "off"
NED_OFF = "off"


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class BuildConfig:
    policy: FactorizationPolicy = FactorizationPolicy.PER_DATASET
    null_codes: Tuple[str, ...] = tuple(sorted(DEFAULT_NULL_CODES))
    null_detection: bool = True
    extractor: str = EXTRACTOR_OFF  # "off" | "gazetteer:<path>" | service URL
    ned: str = NED_OFF  # "off" | service URL
    matching: str = "off"  # off | entity | full
    buffer_size: int = 50_000
    cache_size: int = 1_000_000
    lang: str = "fr"
    pdf_service: str = "http://localhost:8265"
    csv_has_header: bool = True
    max_hops: int = 10

    def validated(self) -> "BuildConfig":
        if self.matching not in MATCHING_MODES:
            raise ConfigError(f"matching must be one of {MATCHING_MODES}")
        if self.buffer_size < 1:
            raise ConfigError("buffer_size must be >= 1")
        if self.cache_size < 1:
            raise ConfigError("cache_size must be >= 1")
        if self.extractor != EXTRACTOR_OFF and not (
            self.extractor.startswith("gazetteer:")
            or self.extractor.startswith("http://")
            or self.extractor.startswith("https://")
        ):
            raise ConfigError(
                "extractor must be 'off', 'gazetteer:<path>', or a service URL"
            )
        if self.ned != NED_OFF and not self.ned.startswith(("http://", "https://")):
            raise ConfigError("ned must be 'off' or a service URL")
        return self


def _parse_bool(text: str, key: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {text!r}")


def _parse_list(text: str) -> Tuple[str, ...]:
    items = []
    for token in text.split(","):
        token = token.strip()
        if len(token) >= 2 and token[0] == token[-1] and token[0] in "\"'":
            token = token[1:-1]
        items.append(token)
    return tuple(items)


def _coerce(key: str, raw: str):
    if key == "policy":
        try:
            return FactorizationPolicy(raw.strip())
        except ValueError:
            valid = ", ".join(p.value for p in FactorizationPolicy)
            raise ConfigError(f"policy must be one of: {valid}")
    if key == "null_codes":
        return _parse_list(raw)
    if key in ("null_detection", "csv_has_header"):
        return _parse_bool(raw, key)
    if key in ("buffer_size", "cache_size", "max_hops"):
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"{key}: expected an integer, got {raw!r}")
    if key in ("extractor", "ned", "matching", "lang", "pdf_service"):
        return raw.strip()
    raise ConfigError(f"unknown configuration key {key!r}")


_KEYS = {f.name for f in fields(BuildConfig)}


def parse_config_text(text: str, origin: str = "<config>") -> dict:
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{origin}:{lineno}: expected key = value")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in _KEYS:
            raise ConfigError(f"{origin}:{lineno}: unknown key {key!r}")
        values[key] = _coerce(key, raw.strip())
    return values


def load_config(
    path: Optional[str] = None,
    overrides: Optional[dict] = None,
    env: Optional[dict] = None,
) -> BuildConfig:
    """File values, then GRAPHFUSE_* environment variables, then explicit
    overrides; later layers win."""
    values: dict = {}
    if path is not None:
        config_path = Path(path)
        if not config_path.exists():
            raise ConfigError(f"config file not found: {path}")
        values.update(parse_config_text(config_path.read_text(encoding="utf-8"), str(path)))
    environment = os.environ if env is None else env
    for key in sorted(_KEYS):
        env_key = ENV_PREFIX + key.upper()
        if env_key in environment:
            values[key] = _coerce(key, environment[env_key])
    if overrides:
        for key, value in overrides.items():
            if value is None:
                continue
            if key not in _KEYS:
                raise ConfigError(f"unknown configuration key {key!r}")
            values[key] = _coerce(key, value) if isinstance(value, str) else value
    return BuildConfig(**values).validated()


def load_null_codes_file(path) -> Tuple[str, ...]:
    """One null code per line; blank lines mean the empty-string code."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return tuple(dict.fromkeys(line.strip() for line in lines))
