"""Service configuration: JSON file plus environment overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Mapping

from .catalog import AND, DATASET_URL_TEMPLATE, MODEL_URL_TEMPLATE, OR
from .errors import ConfigError
from .networks import DEFAULT_MAX_EDGES, DEFAULT_MAX_NODES

ENV_PREFIX = "FACETSCOPE_"

# config key -> environment variable suffix
_ENV_KEYS = {
    "snapshot_path": "SNAPSHOT",
    "host": "HOST",
    "port": "PORT",
    "dataset_url_template": "DATASET_URL_TEMPLATE",
    "model_url_template": "MODEL_URL_TEMPLATE",
    "session_cap": "SESSION_CAP",
    "max_nodes": "MAX_NODES",
    "max_edges": "MAX_EDGES",
    "within_facet_mode": "MODE",
}

_INT_KEYS = {"port", "session_cap", "max_nodes", "max_edges"}


@dataclass
class ServiceConfig:
    snapshot_path: str | None = None
    host: str = "127.0.0.1"
    port: int = 8000
    dataset_url_template: str = DATASET_URL_TEMPLATE
    model_url_template: str = MODEL_URL_TEMPLATE
    session_cap: int = 64
    max_nodes: int = DEFAULT_MAX_NODES
    max_edges: int = DEFAULT_MAX_EDGES
    within_facet_mode: str = OR

    def validate(self) -> "ServiceConfig":
        for key in ("session_cap", "max_nodes", "max_edges", "port"):
            if getattr(self, key) <= 0:
                raise ConfigError(f"{key} must be positive")
        for key in ("dataset_url_template", "model_url_template"):
            template = getattr(self, key)
            if template.count("{id}") != 1:
                raise ConfigError(f"{key} must contain exactly one {{id}} placeholder")
        if self.within_facet_mode not in (OR, AND):
            raise ConfigError(f"within_facet_mode must be {OR!r} or {AND!r}")
        return self

    @property
    def url_templates(self) -> dict[str, str]:
        return {"dataset": self.dataset_url_template, "model": self.model_url_template}


def load_config(
    path: str | Path | None = None,
    env: Mapping[str, str] | None = None,
    **overrides: object,
) -> ServiceConfig:
    """Build a config from (lowest to highest precedence) defaults, a JSON
    file, FACETSCOPE_* environment variables, and explicit overrides."""
    env = os.environ if env is None else env
    values: dict[str, object] = {}
    if path is not None:
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError(f"config {path} must be a JSON object")
        known = {f.name for f in fields(ServiceConfig)}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"config {path} has unknown keys: {sorted(unknown)}")
        values.update(doc)
    for key, suffix in _ENV_KEYS.items():
        raw = env.get(ENV_PREFIX + suffix)
        if raw is None:
            continue
        if key in _INT_KEYS:
            try:
                values[key] = int(raw)
            except ValueError as exc:
                raise ConfigError(f"{ENV_PREFIX}{suffix} must be an integer: {raw!r}") from exc
        else:
            values[key] = raw
    for key, value in overrides.items():
        if value is not None:
            values[key] = value
    try:
        config = ServiceConfig(**values)  # type: ignore[arg-type]
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return config.validate()
