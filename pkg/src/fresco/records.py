"""Annotation record schema: parsing, serialization, and archive validation.

One record per image, one JSON object per line (UTF-8 JSONL). Field names
are snake_case and documented in docs/schema.md. Records are immutable
after parse; unknown fields are preserved in ``extras`` and never scored.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, TextIO

import numpy as np

from .errors import InvariantViolation, MalformedRecord, SchemaViolation

MEDIA = ("photograph", "illustration", "map", "other")
INDOOR_OUTDOOR = ("indoor", "outdoor")
MANMADE_NATURAL = ("manmade", "natural")

# Default histogram bin count per channel; the effective value is a
# schema-level constant per archive and mixed-bin archives are rejected.
DEFAULT_HIST_BINS = 64

HIST_SUM_TOL = 1e-9
PALETTE_SUM_TOL = 1e-9
CONF_SUM_TOL = 1e-6
COVERAGE_SUM_TOL = 1e-6


@dataclass(frozen=True)
class ConfVector:
    """Confidence vector with its declared label list."""

    labels: tuple[str, ...]
    values: np.ndarray

    def to_json(self) -> dict:
        return {"labels": list(self.labels), "values": [float(v) for v in self.values]}

    def argmax_label(self) -> str:
        return self.labels[int(np.argmax(self.values))]


@dataclass(frozen=True)
class TagEntry:
    label: str
    confidence: float = 1.0


@dataclass(frozen=True)
class CaptionEntry:
    text: str
    embedding: np.ndarray


@dataclass(frozen=True)
class SceneEntry:
    conf: ConfVector
    indoor_outdoor: str
    manmade_natural: str


@dataclass(frozen=True)
class PaletteColor:
    rgb: tuple[float, float, float]
    weight: float


@dataclass(frozen=True)
class GlobalMeasures:
    brightness: float
    saturation: float
    grayscale: bool
    palette: tuple[PaletteColor, ...]
    rgb_histograms: np.ndarray  # shape (3, B), channel order red/green/blue
    background_mean_depth: float
    line_map_path: str | None = None  # stored, never scored


@dataclass(frozen=True)
class InstanceAnnotation:
    instance_id: str
    kind: str  # "face" | "object"
    category: str  # always "face" for faces, detector label for objects
    bbox: tuple[float, float, float, float]  # (x, y, w, h) pixels
    mean_depth: float
    # face-only
    age: float | None = None
    gender_conf: ConfVector | None = None
    ethnicity_conf: ConfVector | None = None
    emotion_conf: ConfVector | None = None
    attribute_conf: ConfVector | None = None
    valence: float | None = None
    arousal: float | None = None
    head_pose: tuple[float, float, float] | None = None  # yaw, pitch, roll degrees
    gaze: tuple[float, float] | None = None  # yaw, pitch degrees
    # object-only
    detector_conf: float | None = None
    ocr_text: tuple[str, ...] | None = None

    @property
    def centroid(self) -> tuple[float, float]:
        x, y, w, h = self.bbox
        return (x + w / 2.0, y + h / 2.0)

    @property
    def area(self) -> float:
        return self.bbox[2] * self.bbox[3]


@dataclass(frozen=True)
class ImageRecord:
    image_id: str
    width: int
    height: int
    medium: str
    global_measures: GlobalMeasures
    instances: tuple[InstanceAnnotation, ...]
    coverage: dict[str, float]
    tags: tuple[TagEntry, ...]
    caption: CaptionEntry
    scene: SceneEntry
    image_ref: str | None = None  # optional thumbnail path/URL for UIs
    extras: dict[str, Any] = field(default_factory=dict)

    def faces(self) -> list[InstanceAnnotation]:
        return [i for i in self.instances if i.kind == "face"]

    def objects(self) -> list[InstanceAnnotation]:
        return [i for i in self.instances if i.kind == "object"]

    def tag_labels(self) -> frozenset[str]:
        return frozenset(t.label for t in self.tags)


@dataclass(frozen=True)
class Violation:
    """One archive-readiness problem. Violations are data, not exceptions."""

    kind: str  # duplicate_id | range | invariant | schema | bins | label_space
    image_id: str
    field: str
    message: str


# ---------------------------------------------------------------------------
# parsing helpers

def _need(obj: dict, key: str, image_id: str) -> Any:
    if key not in obj:
        raise SchemaViolation(key, "missing required field", image_id)
    return obj[key]


def _as_number(value: Any, key: str, image_id: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaViolation(key, f"expected number, got {type(value).__name__}", image_id)
    return float(value)


def _as_int(value: Any, key: str, image_id: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaViolation(key, f"expected integer, got {type(value).__name__}", image_id)
    return value


def _as_str(value: Any, key: str, image_id: str) -> str:
    if not isinstance(value, str):
        raise SchemaViolation(key, f"expected string, got {type(value).__name__}", image_id)
    return value


def _as_bool(value: Any, key: str, image_id: str) -> bool:
    if not isinstance(value, bool):
        raise SchemaViolation(key, f"expected boolean, got {type(value).__name__}", image_id)
    return value


def _as_float_list(value: Any, key: str, image_id: str) -> list[float]:
    if not isinstance(value, list):
        raise SchemaViolation(key, "expected array of numbers", image_id)
    return [_as_number(v, key, image_id) for v in value]


def _conf_vector(value: Any, key: str, image_id: str) -> ConfVector:
    if not isinstance(value, dict) or "labels" not in value or "values" not in value:
        raise SchemaViolation(key, "expected {labels: [...], values: [...]}", image_id)
    labels = tuple(_as_str(s, key, image_id) for s in value["labels"])
    values = np.asarray(_as_float_list(value["values"], key, image_id), dtype=np.float64)
    if len(labels) != values.size:
        raise SchemaViolation(key, "labels and values differ in length", image_id)
    return ConfVector(labels, values)


_KNOWN_FIELDS = {
    "image_id", "width", "height", "medium", "global", "instances",
    "coverage", "tags", "caption", "scene", "image_ref",
}

_KNOWN_INSTANCE_FIELDS = {
    "instance_id", "kind", "category", "bbox", "mean_depth",
    "age", "gender_conf", "ethnicity_conf", "emotion_conf", "attribute_conf",
    "valence", "arousal", "head_pose", "gaze", "detector_conf", "ocr_text",
}

_FACE_FIELDS = (
    "age", "gender_conf", "ethnicity_conf", "emotion_conf", "attribute_conf",
    "valence", "arousal", "head_pose", "gaze",
)


def _parse_instance(obj: Any, idx: int, image_id: str) -> InstanceAnnotation:
    key = f"instances[{idx}]"
    if not isinstance(obj, dict):
        raise SchemaViolation(key, "expected object", image_id)
    kind = _as_str(_need(obj, "kind", image_id), "kind", image_id)
    if kind not in ("face", "object"):
        raise SchemaViolation("kind", f"unknown instance kind '{kind}'", image_id)
    bbox_raw = _as_float_list(_need(obj, "bbox", image_id), "bbox", image_id)
    if len(bbox_raw) != 4:
        raise SchemaViolation("bbox", "expected [x, y, w, h]", image_id)
    common = dict(
        instance_id=_as_str(_need(obj, "instance_id", image_id), "instance_id", image_id),
        kind=kind,
        category=_as_str(_need(obj, "category", image_id), "category", image_id),
        bbox=tuple(bbox_raw),
        mean_depth=_as_number(_need(obj, "mean_depth", image_id), "mean_depth", image_id),
    )
    if kind == "face":
        for name in _FACE_FIELDS:
            _need(obj, name, image_id)
        head = _as_float_list(obj["head_pose"], "head_pose", image_id)
        gaze = _as_float_list(obj["gaze"], "gaze", image_id)
        if len(head) != 3:
            raise SchemaViolation("head_pose", "expected [yaw, pitch, roll]", image_id)
        if len(gaze) != 2:
            raise SchemaViolation("gaze", "expected [yaw, pitch]", image_id)
        return InstanceAnnotation(
            **common,
            age=_as_number(obj["age"], "age", image_id),
            gender_conf=_conf_vector(obj["gender_conf"], "gender_conf", image_id),
            ethnicity_conf=_conf_vector(obj["ethnicity_conf"], "ethnicity_conf", image_id),
            emotion_conf=_conf_vector(obj["emotion_conf"], "emotion_conf", image_id),
            attribute_conf=_conf_vector(obj["attribute_conf"], "attribute_conf", image_id),
            valence=_as_number(obj["valence"], "valence", image_id),
            arousal=_as_number(obj["arousal"], "arousal", image_id),
            head_pose=tuple(head),
            gaze=tuple(gaze),
        )
    ocr = obj.get("ocr_text")
    if ocr is not None:
        ocr = tuple(_as_str(t, "ocr_text", image_id) for t in ocr)
    return InstanceAnnotation(
        **common,
        detector_conf=_as_number(_need(obj, "detector_conf", image_id), "detector_conf", image_id),
        ocr_text=ocr,
    )


def _parse_global(obj: Any, image_id: str) -> GlobalMeasures:
    if not isinstance(obj, dict):
        raise SchemaViolation("global", "expected object", image_id)
    palette_raw = _need(obj, "palette", image_id)
    if not isinstance(palette_raw, list):
        raise SchemaViolation("palette", "expected array", image_id)
    palette = []
    for entry in palette_raw:
        if not isinstance(entry, dict) or "rgb" not in entry or "weight" not in entry:
            raise SchemaViolation("palette", "expected {rgb: [r,g,b], weight: w}", image_id)
        rgb = _as_float_list(entry["rgb"], "palette", image_id)
        if len(rgb) != 3:
            raise SchemaViolation("palette", "rgb triple must have 3 entries", image_id)
        palette.append(PaletteColor(tuple(rgb), _as_number(entry["weight"], "palette", image_id)))
    hist_raw = _need(obj, "rgb_histograms", image_id)
    if not isinstance(hist_raw, dict):
        raise SchemaViolation("rgb_histograms", "expected {red: [...], green: [...], blue: [...]}", image_id)
    channels = []
    for channel in ("red", "green", "blue"):
        channels.append(_as_float_list(_need(hist_raw, channel, image_id), "rgb_histograms", image_id))
    if len({len(c) for c in channels}) != 1:
        raise SchemaViolation("rgb_histograms", "channels differ in bin count", image_id)
    return GlobalMeasures(
        brightness=_as_number(_need(obj, "brightness", image_id), "brightness", image_id),
        saturation=_as_number(_need(obj, "saturation", image_id), "saturation", image_id),
        grayscale=_as_bool(_need(obj, "grayscale", image_id), "grayscale", image_id),
        palette=tuple(palette),
        rgb_histograms=np.asarray(channels, dtype=np.float64),
        background_mean_depth=_as_number(
            _need(obj, "background_mean_depth", image_id), "background_mean_depth", image_id
        ),
        line_map_path=obj.get("line_map_path"),
    )


def record_from_dict(obj: dict) -> ImageRecord:
    """Build an ImageRecord from a decoded JSON object (strict)."""
    if not isinstance(obj, dict):
        raise SchemaViolation("<root>", "record must be a JSON object")
    image_id = _as_str(_need(obj, "image_id", ""), "image_id", "")
    width = _as_int(_need(obj, "width", image_id), "width", image_id)
    height = _as_int(_need(obj, "height", image_id), "height", image_id)
    medium = _as_str(_need(obj, "medium", image_id), "medium", image_id)
    if medium not in MEDIA:
        raise SchemaViolation("medium", f"unknown medium '{medium}'", image_id)

    coverage_raw = _need(obj, "coverage", image_id)
    if not isinstance(coverage_raw, dict):
        raise SchemaViolation("coverage", "expected object of class -> fraction", image_id)
    coverage = {k: _as_number(v, "coverage", image_id) for k, v in coverage_raw.items()}

    tags_raw = _need(obj, "tags", image_id)
    if not isinstance(tags_raw, list):
        raise SchemaViolation("tags", "expected array", image_id)
    tags = []
    for entry in tags_raw:
        if not isinstance(entry, dict) or "label" not in entry:
            raise SchemaViolation("tags", "expected {label, confidence?}", image_id)
        tags.append(TagEntry(
            _as_str(entry["label"], "tags", image_id),
            _as_number(entry.get("confidence", 1.0), "tags", image_id),
        ))

    caption_raw = _need(obj, "caption", image_id)
    if not isinstance(caption_raw, dict):
        raise SchemaViolation("caption", "expected {text, embedding}", image_id)
    caption = CaptionEntry(
        text=_as_str(_need(caption_raw, "text", image_id), "caption", image_id),
        embedding=np.asarray(
            _as_float_list(_need(caption_raw, "embedding", image_id), "caption", image_id),
            dtype=np.float64,
        ),
    )

    scene_raw = _need(obj, "scene", image_id)
    if not isinstance(scene_raw, dict):
        raise SchemaViolation("scene", "expected object", image_id)
    indoor = _as_str(_need(scene_raw, "indoor_outdoor", image_id), "indoor_outdoor", image_id)
    manmade = _as_str(_need(scene_raw, "manmade_natural", image_id), "manmade_natural", image_id)
    if indoor not in INDOOR_OUTDOOR:
        raise SchemaViolation("indoor_outdoor", f"expected one of {INDOOR_OUTDOOR}", image_id)
    if manmade not in MANMADE_NATURAL:
        raise SchemaViolation("manmade_natural", f"expected one of {MANMADE_NATURAL}", image_id)
    scene = SceneEntry(
        conf=_conf_vector(_need(scene_raw, "conf", image_id), "scene", image_id),
        indoor_outdoor=indoor,
        manmade_natural=manmade,
    )

    instances_raw = _need(obj, "instances", image_id)
    if not isinstance(instances_raw, list):
        raise SchemaViolation("instances", "expected array", image_id)
    instances = tuple(_parse_instance(o, i, image_id) for i, o in enumerate(instances_raw))

    image_ref = obj.get("image_ref")
    if image_ref is not None:
        image_ref = _as_str(image_ref, "image_ref", image_id)

    extras = {k: v for k, v in obj.items() if k not in _KNOWN_FIELDS}
    return ImageRecord(
        image_id=image_id,
        width=width,
        height=height,
        medium=medium,
        global_measures=_parse_global(_need(obj, "global", image_id), image_id),
        instances=instances,
        coverage=coverage,
        tags=tuple(tags),
        caption=caption,
        scene=scene,
        image_ref=image_ref,
        extras=extras,
    )


def parse_record(text: str, line_no: int | None = None) -> ImageRecord:
    """Parse one record line; raise on the first schema or invariant problem."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedRecord(str(exc), line_no) from exc
    record = record_from_dict(obj)
    for violation in record_violations(record):
        raise InvariantViolation(violation.field, violation.message, record.image_id)
    return record


# ---------------------------------------------------------------------------
# serialization

def record_to_dict(record: ImageRecord) -> dict:
    g = record.global_measures
    out: dict[str, Any] = {
        "image_id": record.image_id,
        "width": record.width,
        "height": record.height,
        "medium": record.medium,
        "global": {
            "brightness": g.brightness,
            "saturation": g.saturation,
            "grayscale": g.grayscale,
            "palette": [{"rgb": list(c.rgb), "weight": c.weight} for c in g.palette],
            "rgb_histograms": {
                "red": [float(v) for v in g.rgb_histograms[0]],
                "green": [float(v) for v in g.rgb_histograms[1]],
                "blue": [float(v) for v in g.rgb_histograms[2]],
            },
            "background_mean_depth": g.background_mean_depth,
        },
        "instances": [_instance_to_dict(i) for i in record.instances],
        "coverage": dict(record.coverage),
        "tags": [{"label": t.label, "confidence": t.confidence} for t in record.tags],
        "caption": {
            "text": record.caption.text,
            "embedding": [float(v) for v in record.caption.embedding],
        },
        "scene": {
            "conf": record.scene.conf.to_json(),
            "indoor_outdoor": record.scene.indoor_outdoor,
            "manmade_natural": record.scene.manmade_natural,
        },
    }
    if g.line_map_path is not None:
        out["global"]["line_map_path"] = g.line_map_path
    if record.image_ref is not None:
        out["image_ref"] = record.image_ref
    out.update(record.extras)
    return out


def _instance_to_dict(inst: InstanceAnnotation) -> dict:
    out: dict[str, Any] = {
        "instance_id": inst.instance_id,
        "kind": inst.kind,
        "category": inst.category,
        "bbox": list(inst.bbox),
        "mean_depth": inst.mean_depth,
    }
    if inst.kind == "face":
        out.update(
            age=inst.age,
            gender_conf=inst.gender_conf.to_json(),
            ethnicity_conf=inst.ethnicity_conf.to_json(),
            emotion_conf=inst.emotion_conf.to_json(),
            attribute_conf=inst.attribute_conf.to_json(),
            valence=inst.valence,
            arousal=inst.arousal,
            head_pose=list(inst.head_pose),
            gaze=list(inst.gaze),
        )
    else:
        out["detector_conf"] = inst.detector_conf
        if inst.ocr_text is not None:
            out["ocr_text"] = list(inst.ocr_text)
    return out


def serialize_record(record: ImageRecord) -> str:
    """One JSONL line, deterministic field order."""
    return json.dumps(record_to_dict(record), separators=(",", ":"), ensure_ascii=False)


# ---------------------------------------------------------------------------
# validation

def _in_range(value: float, lo: float, hi: float) -> bool:
    return lo <= value <= hi and math.isfinite(value)


def record_violations(record: ImageRecord) -> Iterator[Violation]:
    """Yield every invariant violation in one record."""
    rid = record.image_id

    def bad(kind: str, field_name: str, message: str) -> Violation:
        return Violation(kind, rid, field_name, message)

    if record.width <= 0 or record.height <= 0:
        yield bad("range", "width" if record.width <= 0 else "height", "dimensions must be positive")
        return  # bbox checks below would be meaningless

    g = record.global_measures
    if not _in_range(g.brightness, 0.0, 1.0):
        yield bad("range", "brightness", f"{g.brightness} outside [0, 1]")
    if not _in_range(g.saturation, 0.0, 1.0):
        yield bad("range", "saturation", f"{g.saturation} outside [0, 1]")
    if not _in_range(g.background_mean_depth, 0.0, 1.0):
        yield bad("range", "background_mean_depth", f"{g.background_mean_depth} outside [0, 1]")

    if np.any(g.rgb_histograms < 0):
        yield bad("invariant", "rgb_histograms", "negative bin mass")
    sums = g.rgb_histograms.sum(axis=1)
    for channel, total in zip(("red", "green", "blue"), sums):
        if abs(total - 1.0) > HIST_SUM_TOL:
            yield bad("invariant", "rgb_histograms", f"{channel} channel sums to {total}, expected 1")

    if g.palette:
        weight_sum = sum(c.weight for c in g.palette)
        if abs(weight_sum - 1.0) > PALETTE_SUM_TOL:
            yield bad("invariant", "palette", f"weights sum to {weight_sum}, expected 1")
        for c in g.palette:
            if not all(_in_range(v, 0.0, 255.0) for v in c.rgb):
                yield bad("range", "palette", f"rgb {c.rgb} outside [0, 255]")
            if not _in_range(c.weight, 0.0, 1.0):
                yield bad("range", "palette", f"weight {c.weight} outside [0, 1]")
    else:
        yield bad("invariant", "palette", "palette is empty")

    coverage_sum = 0.0
    for label, fraction in record.coverage.items():
        coverage_sum += fraction
        if not _in_range(fraction, 0.0, 1.0):
            yield bad("range", "coverage", f"class '{label}' fraction {fraction} outside [0, 1]")
    if coverage_sum > 1.0 + COVERAGE_SUM_TOL:
        yield bad("invariant", "coverage", f"fractions sum to {coverage_sum} > 1")

    labels = [t.label for t in record.tags]
    if len(labels) != len(set(labels)):
        yield bad("invariant", "tags", "duplicate tag labels")

    if np.any(record.scene.conf.values < 0):
        yield bad("range", "scene", "negative scene confidence")

    for idx, inst in enumerate(record.instances):
        x, y, w, h = inst.bbox
        where = f"instance '{inst.instance_id}'"
        if w <= 0 or h <= 0:
            yield bad("range", "bbox", f"{where}: bbox sides must be positive")
        elif not (0 <= x and 0 <= y and x + w <= record.width and y + h <= record.height):
            yield bad("range", "bbox", f"{where}: bbox {inst.bbox} outside image bounds")
        if not _in_range(inst.mean_depth, 0.0, 1.0):
            yield bad("range", "mean_depth", f"{where}: {inst.mean_depth} outside [0, 1]")
        if inst.kind == "face":
            yield from _face_violations(record, inst, where)
        else:
            if not _in_range(inst.detector_conf, 0.0, 1.0):
                yield bad("range", "detector_conf", f"{where}: {inst.detector_conf} outside [0, 1]")


def _face_violations(record: ImageRecord, inst: InstanceAnnotation, where: str) -> Iterator[Violation]:
    rid = record.image_id
    if inst.valence is not None and not _in_range(inst.valence, -1.0, 1.0):
        yield Violation("range", rid, "valence", f"{where}: {inst.valence} outside [-1, 1]")
    if inst.arousal is not None and not _in_range(inst.arousal, -1.0, 1.0):
        yield Violation("range", rid, "arousal", f"{where}: {inst.arousal} outside [-1, 1]")
    if inst.age is not None and (inst.age < 0 or not math.isfinite(inst.age)):
        yield Violation("range", rid, "age", f"{where}: age {inst.age} negative")
    for name, conf, normalized in (
        ("gender_conf", inst.gender_conf, False),
        ("ethnicity_conf", inst.ethnicity_conf, True),
        ("emotion_conf", inst.emotion_conf, True),
        ("attribute_conf", inst.attribute_conf, False),
    ):
        if conf is None:
            continue
        if np.any(conf.values < 0):
            yield Violation("range", rid, name, f"{where}: negative confidence")
        elif normalized and abs(float(conf.values.sum()) - 1.0) > CONF_SUM_TOL:
            yield Violation(
                "invariant", rid, name,
                f"{where}: multiclass vector sums to {float(conf.values.sum())}, expected 1",
            )


def validate_archive(records: Iterable[ImageRecord]) -> list[Violation]:
    """Every invariant and uniqueness violation across an archive.

    An empty list means the archive is scoring-ready.
    """
    violations: list[Violation] = []
    seen: dict[str, int] = {}
    bins: int | None = None
    label_spaces: dict[str, tuple[str, ...]] = {}
    for record in records:
        if record.image_id in seen:
            violations.append(Violation(
                "duplicate_id", record.image_id, "image_id",
                f"image_id '{record.image_id}' already used",
            ))
        seen[record.image_id] = seen.get(record.image_id, 0) + 1
        violations.extend(record_violations(record))

        b = record.global_measures.rgb_histograms.shape[1]
        if bins is None:
            bins = b
        elif b != bins:
            violations.append(Violation(
                "bins", record.image_id, "rgb_histograms",
                f"{b} bins, archive uses {bins}",
            ))

        spaces = {"scene": record.scene.conf.labels}
        for inst in record.instances:
            if inst.kind != "face":
                continue
            spaces.update(
                gender_conf=inst.gender_conf.labels,
                ethnicity_conf=inst.ethnicity_conf.labels,
                emotion_conf=inst.emotion_conf.labels,
                attribute_conf=inst.attribute_conf.labels,
            )
        for name, labels in spaces.items():
            if name not in label_spaces:
                label_spaces[name] = labels
            elif label_spaces[name] != labels:
                violations.append(Violation(
                    "label_space", record.image_id, name,
                    "label list differs from the rest of the archive",
                ))
    return violations


# ---------------------------------------------------------------------------
# archive I/O

def iter_records(stream: TextIO) -> Iterator[ImageRecord]:
    for line_no, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        yield parse_record(line, line_no)


def load_records(path: str) -> list[ImageRecord]:
    with open(path, "r", encoding="utf-8") as fh:
        return list(iter_records(fh))


def save_records(records: Iterable[ImageRecord], path: str) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(serialize_record(record))
            fh.write("\n")
            n += 1
    return n


# ---------------------------------------------------------------------------
# embedding table

class EmbeddingTable:
    """Label -> unit-norm vector, all of one dimension."""

    def __init__(self, dim: int, vectors: dict[str, np.ndarray]):
        self.dim = dim
        self.vectors = vectors
        for label, vec in vectors.items():
            if vec.shape != (dim,):
                raise SchemaViolation("embedding", f"label '{label}' has dimension {vec.size}, expected {dim}")
            norm = float(np.linalg.norm(vec))
            if abs(norm - 1.0) > 1e-6:
                raise InvariantViolation("embedding", f"label '{label}' has norm {norm}, expected 1")

    def __contains__(self, label: str) -> bool:
        return label in self.vectors

    def __getitem__(self, label: str) -> np.ndarray:
        return self.vectors[label]


def load_embedding_table(path: str) -> EmbeddingTable:
    """Read the `dim=D` header plus one `label<TAB>v1,v2,...` line per label."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header.startswith("dim="):
            raise MalformedRecord(f"embedding table header must be 'dim=D', got '{header}'")
        dim = int(header[4:])
        vectors: dict[str, np.ndarray] = {}
        for line_no, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                label, values = line.split("\t", 1)
            except ValueError as exc:
                raise MalformedRecord("expected label<TAB>v1,v2,...", line_no) from exc
            vectors[label] = np.asarray([float(v) for v in values.split(",")], dtype=np.float64)
    return EmbeddingTable(dim, vectors)


def save_embedding_table(table: EmbeddingTable, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"dim={table.dim}\n")
        for label in sorted(table.vectors):
            values = ",".join(repr(float(v)) for v in table.vectors[label])
            fh.write(f"{label}\t{values}\n")
