"""Measure registry: which measures exist, how each is compared, where it
sits in the similarity tree. Ships as editable JSON (data/measures.json)."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .errors import UnknownMeasure

LEVELS = ("plastic", "figurative", "enunciational")
METRICS = (
    "abs_error", "hellinger", "palette_cielab", "jaccard",
    "continuous_jaccard", "cosine", "binary", "count_ratio",
)


@dataclass(frozen=True)
class MeasureDescriptor:
    measure_id: str
    name: str
    level: str
    group: str
    scope: str  # "image" | "instance"
    metric: str
    range: tuple[float, float] | None = None  # scalar (abs_error) measures only
    applies_to: str = "all"  # instance scope: "face" | "object" | "all"
    signed: bool = False  # cosine: remap [-1,1] -> [0,1]
    weight: float = 1.0

    @property
    def path(self) -> str:
        return f"{self.level}/{self.group}/{self.measure_id}"


class Registry:
    """Ordered measure descriptors plus the level/group tree they induce."""

    def __init__(self, descriptors: list[MeasureDescriptor]):
        self.descriptors = list(descriptors)
        self.by_id: dict[str, MeasureDescriptor] = {}
        for d in self.descriptors:
            if d.measure_id in self.by_id:
                raise ValueError(f"duplicate measure id '{d.measure_id}'")
            if d.level not in LEVELS:
                raise ValueError(f"measure '{d.measure_id}' has unknown level '{d.level}'")
            if d.metric not in METRICS:
                raise ValueError(f"measure '{d.measure_id}' has unknown metric '{d.metric}'")
            if d.metric == "abs_error":
                if d.range is None or not d.range[0] < d.range[1]:
                    raise ValueError(f"scalar measure '{d.measure_id}' needs a finite range")
            if d.scope not in ("image", "instance"):
                raise ValueError(f"measure '{d.measure_id}' has unknown scope '{d.scope}'")
            if d.weight < 0:
                raise ValueError(f"measure '{d.measure_id}' has negative weight")
            self.by_id[d.measure_id] = d
        # level -> group -> descriptors, in file order
        self.tree: dict[str, dict[str, list[MeasureDescriptor]]] = {lvl: {} for lvl in LEVELS}
        for d in self.descriptors:
            self.tree[d.level].setdefault(d.group, []).append(d)
        self.fingerprint = json.dumps(self.to_json(), sort_keys=True)

    def get(self, measure_id: str) -> MeasureDescriptor:
        try:
            return self.by_id[measure_id]
        except KeyError:
            raise UnknownMeasure(f"measure '{measure_id}' not in registry") from None

    def __contains__(self, measure_id: str) -> bool:
        return measure_id in self.by_id

    def __len__(self) -> int:
        return len(self.descriptors)

    def to_json(self) -> dict:
        return {
            "version": 1,
            "levels": list(LEVELS),
            "measures": [
                {
                    "id": d.measure_id,
                    "name": d.name,
                    "level": d.level,
                    "group": d.group,
                    "scope": d.scope,
                    "metric": d.metric,
                    **({"range": list(d.range)} if d.range else {}),
                    **({"applies_to": d.applies_to} if d.scope == "instance" else {}),
                    **({"signed": d.signed} if d.metric == "cosine" else {}),
                    "weight": d.weight,
                }
                for d in self.descriptors
            ],
        }


def _descriptor_from_json(entry: dict) -> MeasureDescriptor:
    return MeasureDescriptor(
        measure_id=entry["id"],
        name=entry["name"],
        level=entry["level"],
        group=entry["group"],
        scope=entry["scope"],
        metric=entry["metric"],
        range=tuple(entry["range"]) if "range" in entry else None,
        applies_to=entry.get("applies_to", "all"),
        signed=entry.get("signed", False),
        weight=entry.get("weight", 1.0),
    )


def registry_from_json(obj: dict) -> Registry:
    return Registry([_descriptor_from_json(e) for e in obj["measures"]])


def load_registry(path: str | None = None) -> Registry:
    """Load a registry file; the packaged default when no path is given."""
    if path is None:
        text = resources.files("fresco.data").joinpath("measures.json").read_text("utf-8")
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    return registry_from_json(json.loads(text))


_default: Registry | None = None


def default_registry() -> Registry:
    global _default
    if _default is None:
        _default = load_registry()
    return _default
