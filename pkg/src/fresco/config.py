"""Engine configuration: file paths plus threshold/weight settings.

Loaded from JSON (``--config`` or the FRESCO_CONFIG environment variable);
every field has a default so the engine runs with no config file at all.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .errors import FrescoError
from .registry import Registry, load_registry
from .scoring import WeightConfig
from .traits import DEFAULT_THRESHOLDS, ThresholdConfig

ENV_VAR = "FRESCO_CONFIG"
DEFAULT_BIND = "127.0.0.1:8765"


@dataclass
class EngineConfig:
    archive: str | None = None
    registry_path: str | None = None
    synsets_path: str | None = None
    embeddings_path: str | None = None
    bind: str = DEFAULT_BIND
    thresholds: ThresholdConfig = field(default_factory=ThresholdConfig)
    weights: WeightConfig = field(default_factory=WeightConfig)
    max_export_instances: int = 8

    def load_registry(self) -> Registry:
        return load_registry(self.registry_path)

    def check_paths(self) -> None:
        for label, path in (
            ("archive", self.archive),
            ("registry", self.registry_path),
            ("synsets", self.synsets_path),
            ("embeddings", self.embeddings_path),
        ):
            if path is not None and not os.path.exists(path):
                raise FrescoError(f"configured {label} path '{path}' does not exist")


def _thresholds_from(obj: dict) -> ThresholdConfig:
    return ThresholdConfig(
        band_proportions=tuple(obj.get("band_proportions", DEFAULT_THRESHOLDS.band_proportions)),
        ellipse_factor=obj.get("ellipse_factor", DEFAULT_THRESHOLDS.ellipse_factor),
        portrait_ratio=obj.get("portrait_ratio", DEFAULT_THRESHOLDS.portrait_ratio),
        group_breaks=tuple(obj.get("group_breaks", DEFAULT_THRESHOLDS.group_breaks)),
    )


def _weights_from(obj: dict) -> WeightConfig:
    return WeightConfig(
        alpha=obj.get("alpha", 1.0),
        beta=obj.get("beta", 1.0),
        gamma=obj.get("gamma", 1.0),
        node_weights=dict(obj.get("node_weights", {})),
    )


def load_config(path: str | None = None) -> EngineConfig:
    """Read a config file; fall back to FRESCO_CONFIG, then to defaults."""
    if path is None:
        path = os.environ.get(ENV_VAR)
    if path is None:
        return EngineConfig()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise FrescoError(f"cannot read config '{path}': {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FrescoError(f"config '{path}' is not valid JSON: {exc}") from exc
    cfg = EngineConfig(
        archive=raw.get("archive"),
        registry_path=raw.get("registry"),
        synsets_path=raw.get("synsets"),
        embeddings_path=raw.get("embeddings"),
        bind=raw.get("bind", DEFAULT_BIND),
        thresholds=_thresholds_from(raw.get("thresholds", {})),
        weights=_weights_from(raw.get("weights", {})),
        max_export_instances=raw.get("max_export_instances", 8),
    )
    cfg.check_paths()
    return cfg
