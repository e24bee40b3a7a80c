"""Loading and validation of benchmark configuration files.

Configuration files are flat JSON objects whose keys are exactly the field
names of :class:`~sparse_prior.bench.ExperimentConfig`; every key is optional
and missing keys take the dataclass defaults. Example::

    {
        "n": 240,
        "m": 70,
        "trials": 200,
        "noise_variance": 1e-3,
        "algorithms": ["niht", "ka-niht", "rka-niht"],
        "seed": 7
    }

JSON arrays map onto the tuple-valued fields (``group_sizes``,
``group_probs``, ``m_values``, ``sigma_values``, ``algorithms``). Unknown
keys are rejected rather than ignored so a typo cannot silently fall back to
a default.
"""

from __future__ import annotations

import json
from dataclasses import fields
from pathlib import Path
from typing import Any, Mapping

from .bench import ExperimentConfig

__all__ = ["ConfigError", "load_config", "resolve_config", "CONFIG_KEYS"]

CONFIG_KEYS = tuple(f.name for f in fields(ExperimentConfig))

_TUPLE_KEYS = ("group_sizes", "group_probs", "m_values", "sigma_values", "algorithms")


class ConfigError(ValueError):
    """A configuration file or override set cannot produce a valid run."""


def load_config(path: str | Path) -> dict[str, Any]:
    """Read a JSON configuration file into a plain dict.

    An empty or whitespace-only file counts as the empty configuration.
    Raises :class:`ConfigError` for unreadable files, invalid JSON, or a
    top-level value that is not an object.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    if text.strip() == "":
        return {}
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(
            f"config file {path} must hold a JSON object, got {type(data).__name__}"
        )
    return data


def resolve_config(
    data: Mapping[str, Any] | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> ExperimentConfig:
    """Merge file data with overrides and build a validated configuration.

    ``overrides`` win over ``data`` key by key. Unknown keys and values the
    configuration rejects both raise :class:`ConfigError` naming the problem.
    """
    merged: dict[str, Any] = {}
    merged.update(data or {})
    merged.update(overrides or {})
    for key in merged:
        if key not in CONFIG_KEYS:
            raise ConfigError(
                f"unknown configuration key {key!r}; valid keys: {', '.join(CONFIG_KEYS)}"
            )
    for key in _TUPLE_KEYS:
        if key in merged and isinstance(merged[key], (list, tuple)):
            merged[key] = tuple(merged[key])
    try:
        return ExperimentConfig(**merged)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
