"""Derived trait measures: positional ratios, discretizations, framing, group size.

Converts one validated record into its "digital identikit": a per-image and
per-instance map of measure id -> value. Scored measure ids match the
registry; the additional ``*-band`` / ``*-class`` / ``*-group`` / ``*-label``
ids are categorical summaries for distributions and tabular export.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import ZeroDimension
from .records import ConfVector, ImageRecord, PaletteColor

# Object-detector labels counted as people (2.2.1.1); the full cross-task
# synset lives in the consistency module's config.
DEFAULT_PERSON_LABELS = frozenset({"person", "man", "woman", "boy", "girl"})

POSITION_BANDS = ("low_or_left", "center", "high_or_right")
CENTRALITY_CLASSES = ("central", "peripheral")
FRAMING_CLASSES = ("portrait", "scene")
GROUP_SIZES = ("single", "couple", "small_group", "medium_group", "large_group", "crowd")


@dataclass(frozen=True)
class ThresholdConfig:
    """Empirical discretization thresholds; all adjustable."""

    band_proportions: tuple[float, float, float] = (0.4, 0.2, 0.4)
    ellipse_factor: float = 0.6
    portrait_ratio: float = 0.3
    group_breaks: tuple[int, ...] = (1, 2, 6, 12, 30)

    def __post_init__(self):
        if any(p <= 0 for p in self.band_proportions):
            raise ValueError("band proportions must be positive")
        if abs(sum(self.band_proportions) - 1.0) > 1e-9:
            raise ValueError("band proportions must sum to 1")
        if not 0 < self.ellipse_factor <= 1:
            raise ValueError("ellipse_factor must be in (0, 1]")
        if not 0 < self.portrait_ratio < 1:
            raise ValueError("portrait_ratio must be in (0, 1)")
        if list(self.group_breaks) != sorted(set(self.group_breaks)):
            raise ValueError("group_breaks must be strictly increasing")


DEFAULT_THRESHOLDS = ThresholdConfig()


@dataclass(frozen=True)
class TraitVector:
    """All derived measures of one image, keyed by measure id."""

    image: dict[str, Any]
    instances: dict[str, dict[str, Any]]  # instance_id -> measure_id -> value


def centroid_ratios(
    bbox: tuple[float, float, float, float], width: float, height: float
) -> tuple[float, float, float]:
    """Horizontal ratio, vertical ratio, and radial centrality of a bbox centroid.

    All three live in [0, 1] and are independent of image size. Centrality is
    the centroid's radial distance from the image center, normalized so that
    1.0 lies on the ellipse with semiaxes (width/2, height/2), clamped beyond.
    """
    if width == 0 or height == 0:
        raise ZeroDimension("image has zero width or height")
    cx = bbox[0] + bbox[2] / 2.0
    cy = bbox[1] + bbox[3] / 2.0
    h_ratio = cx / width
    v_ratio = cy / height
    dx = (cx - width / 2.0) / (width / 2.0)
    dy = (cy - height / 2.0) / (height / 2.0)
    centrality = min(math.sqrt(dx * dx + dy * dy), 1.0)
    return h_ratio, v_ratio, centrality


def discretize_position(ratio: float, cfg: ThresholdConfig = DEFAULT_THRESHOLDS) -> str:
    """Map a positional ratio to its 40:20:40 band; both edges belong to center."""
    low, center, _ = cfg.band_proportions
    if ratio < low:
        return "low_or_left"
    if ratio <= low + center:
        return "center"
    return "high_or_right"


def classify_centrality(centrality: float, cfg: ThresholdConfig = DEFAULT_THRESHOLDS) -> str:
    """Central iff the centroid falls within the configured ellipse (boundary inclusive)."""
    return "central" if centrality <= cfg.ellipse_factor else "peripheral"


def classify_framing(
    record: ImageRecord, cfg: ThresholdConfig = DEFAULT_THRESHOLDS
) -> tuple[str, float]:
    """(portrait|scene, largest-face area ratio). Portrait needs strictly more
    than the configured fraction of the image covered by one face crop."""
    area = float(record.width) * float(record.height)
    ratio = 0.0
    for inst in record.instances:
        if inst.kind == "face":
            ratio = max(ratio, inst.area / area)
    return ("portrait" if ratio > cfg.portrait_ratio else "scene"), ratio


def discretize_group_size(count: int, cfg: ThresholdConfig = DEFAULT_THRESHOLDS) -> str:
    """Bucket a person count: 0-1 single, 2 couple, 3-6 small, 7-12 medium,
    13-30 large, 31+ crowd (with default breaks)."""
    if count < 0:
        raise ValueError("count must be non-negative")
    for label, upper in zip(GROUP_SIZES, cfg.group_breaks):
        if count <= upper:
            return label
    return GROUP_SIZES[len(cfg.group_breaks)]


def person_count(record: ImageRecord, person_labels: frozenset[str] = DEFAULT_PERSON_LABELS) -> int:
    """People counted over object-detector instances, so occluded faces count too."""
    return sum(1 for i in record.instances if i.kind == "object" and i.category in person_labels)


def _mean(values: list[float]) -> float | None:
    return sum(values) / len(values) if values else None


def derive_traits(
    record: ImageRecord,
    cfg: ThresholdConfig = DEFAULT_THRESHOLDS,
    person_labels: frozenset[str] = DEFAULT_PERSON_LABELS,
) -> TraitVector:
    """Compute every implemented measure for one record. Pure and deterministic."""
    g = record.global_measures
    framing_class, framing_ratio = classify_framing(record, cfg)
    n_people = person_count(record, person_labels)
    n_objects = sum(
        1 for i in record.instances if i.kind == "object" and i.category not in person_labels
    )

    subject_depths: list[float] = []
    character_depths: list[float] = []
    for inst in record.instances:
        if inst.kind != "object":
            continue
        subject_depths.append(inst.mean_depth)
        if inst.category in person_labels:
            character_depths.append(inst.mean_depth)

    image: dict[str, Any] = {
        "0.1": record.medium,
        "1.2.1-palette": g.palette,
        "1.2.1-grayscale": g.grayscale,
        "1.2.1-histogram": g.rgb_histograms,
        "1.2.2": g.brightness,
        "1.2.3": g.saturation,
        "1.3.4-background": g.background_mean_depth,
        "1.3.5": dict(record.coverage),
        "2.1.1": record.tag_labels(),
        "2.2.1.1": n_people,
        "2.2.1.1-group": discretize_group_size(n_people, cfg),
        "2.2.3.2-count": n_objects,
        "2.2.4.1": record.scene.conf,
        "2.2.4.4": record.scene.manmade_natural,
        "2.4.1-caption": record.caption.embedding,
        "3.1.1": _mean(subject_depths),
        "3.1.2": _mean(character_depths),
        "3.1.3-class": framing_class,
        "3.1.3-ratio": framing_ratio,
        "3.1.3-indoor_outdoor": record.scene.indoor_outdoor,
    }

    instances: dict[str, dict[str, Any]] = {}
    for inst in record.instances:
        h_ratio, v_ratio, centrality = centroid_ratios(inst.bbox, record.width, record.height)
        values: dict[str, Any] = {
            "1.3.1": v_ratio,
            "1.3.1-band": discretize_position(v_ratio, cfg),
            "1.3.2": h_ratio,
            "1.3.2-band": discretize_position(h_ratio, cfg),
            "1.3.3": centrality,
            "1.3.3-class": classify_centrality(centrality, cfg),
            "1.3.4-instance": inst.mean_depth,
        }
        if inst.kind == "face":
            values.update({
                "2.2.2.2": inst.age,
                "2.2.2.3": inst.gender_conf,
                "2.2.2.5": inst.ethnicity_conf,
                "2.2.2.15": inst.attribute_conf,
                "2.5.1": inst.arousal,
                "2.5.2": inst.emotion_conf,
                "2.5.2-label": inst.emotion_conf.argmax_label(),
                "2.5.3": inst.valence,
                "3.2.1-yaw": inst.head_pose[0],
                "3.2.1-pitch": inst.head_pose[1],
                "3.2.1-roll": inst.head_pose[2],
                "3.2.3-yaw": inst.gaze[0],
                "3.2.3-pitch": inst.gaze[1],
            })
        else:
            values["2.2.3.3"] = frozenset(inst.ocr_text or ())
        instances[inst.instance_id] = values

    return TraitVector(image=image, instances=instances)


def _trait_value_to_json(value: Any) -> Any:
    if isinstance(value, frozenset):
        return sorted(value)
    if isinstance(value, np.ndarray):
        if value.ndim == 1:
            return [float(v) for v in value]
        return [[float(v) for v in row] for row in value]
    if isinstance(value, ConfVector):
        return value.to_json()
    if isinstance(value, tuple) and value and isinstance(value[0], PaletteColor):
        return [{"rgb": list(c.rgb), "weight": c.weight} for c in value]
    return value


def traits_to_dict(traits: TraitVector) -> dict:
    """JSON-ready view with deterministic ordering, for export and goldens."""
    return {
        "image": {k: _trait_value_to_json(v) for k, v in sorted(traits.image.items())},
        "instances": {
            iid: {k: _trait_value_to_json(v) for k, v in sorted(values.items())}
            for iid, values in traits.instances.items()
        },
    }
