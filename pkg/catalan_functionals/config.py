from __future__ import annotations

import copy
import logging
from importlib.resources import files
from pathlib import Path
from typing import Any

import yaml

from .errors import ArgumentError

logger = logging.getLogger(__name__)


def load_yaml_resource(path: str) -> dict:
    return yaml.safe_load((files("catalan_functionals") / "defaults" / path).read_text(encoding="utf-8"))


DEFAULTS = load_yaml_resource("defaults.yaml")

_settings: dict = copy.deepcopy(DEFAULTS)


def _merge(base: dict, override: dict, prefix: str = "") -> None:
    for key, value in override.items():
        dotted = f"{prefix}{key}"
        if key not in base:
            raise ArgumentError(f"unknown setting {dotted!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ArgumentError(f"setting {dotted!r} must be a mapping")
            _merge(base[key], value, dotted + ".")
        else:
            base[key] = value


def load_settings(path: str | Path) -> dict:
    """Merge a user YAML file over the packaged defaults and make it current."""
    global _settings
    text = Path(path).read_text(encoding="utf-8")
    override = yaml.safe_load(text) or {}
    if not isinstance(override, dict):
        raise ArgumentError(f"{path}: top level must be a mapping")
    merged = copy.deepcopy(DEFAULTS)
    _merge(merged, override)
    _settings = merged
    logger.debug("settings loaded from %s", path)
    return merged


def reset_settings() -> None:
    global _settings
    _settings = copy.deepcopy(DEFAULTS)


def setting(key: str) -> Any:
    """Look up a dotted key such as ``"integrals.tol"``."""
    node: Any = _settings
    for part in key.split("."):
        if not isinstance(node, dict) or part not in node:
            raise ArgumentError(f"unknown setting {key!r}")
        node = node[part]
    return node
