"""Synthetic archive generator with recorded ground truth.

Produces schema-valid records for any seed, deterministically (numpy PCG64),
plus a truth bundle: per-image person counts, group buckets, planted emotion
labels, portrait flags, and any duplicated records. Label embeddings come from
a companion generator that groups synonyms around shared anchors so topic
overlap reacts to the similarity threshold.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .records import (
    CaptionEntry,
    ConfVector,
    EmbeddingTable,
    GlobalMeasures,
    ImageRecord,
    InstanceAnnotation,
    PaletteColor,
    SceneEntry,
    TagEntry,
)
from .traits import DEFAULT_THRESHOLDS, ThresholdConfig, discretize_group_size

DIMS = ((640, 480), (800, 600), (1024, 768), (1280, 960), (720, 1280), (1080, 1080))

PERSON_CATEGORIES = ("person", "man", "woman", "boy", "girl")
OBJECT_CATEGORIES = ("ball", "bicycle", "bottle", "car", "chair", "dog", "tree")
COVERAGE_CLASSES = (
    "sky", "grass", "road", "building", "tree", "water", "wall", "floor", "sand", "person",
)
SCENE_CLASSES = ("beach", "bedroom", "forest", "kitchen", "office", "park", "stadium", "street")
INDOOR_SCENES = frozenset({"bedroom", "kitchen", "office"})
NATURAL_SCENES = frozenset({"beach", "forest", "park"})

EMOTION_LABELS = ("happy", "neutral", "fear", "sadness", "disgust")
EMOTION_MIX = (0.42, 0.34, 0.06, 0.12, 0.06)
# valence/arousal means per emotion label
_VALENCE_MEAN = {"happy": 0.6, "neutral": 0.0, "fear": -0.4, "sadness": -0.5, "disgust": -0.5}
_AROUSAL_MEAN = {"happy": 0.4, "neutral": 0.0, "fear": 0.6, "sadness": -0.3, "disgust": 0.2}

ETHNICITY_LABELS = ("asian", "black", "indian", "latino", "white")
ETHNICITY_MIX = (0.3, 0.1, 0.08, 0.12, 0.4)
GENDER_LABELS = ("female", "male")

ATTRIBUTE_LABELS = (
    "arched_eyebrows", "bags_under_eyes", "bald", "bangs", "beard", "big_lips",
    "big_nose", "black_hair", "blond_hair", "blurry", "brown_hair", "bushy_eyebrows",
    "chubby", "double_chin", "earrings", "eyeglasses", "goatee", "gray_hair", "hat",
    "heavy_makeup", "high_cheekbones", "lipstick", "mustache", "narrow_eyes",
    "necklace", "necktie", "no_beard", "oval_face", "pale_skin", "pointy_nose",
    "receding_hairline", "rosy_cheeks", "sideburns", "smiling", "straight_hair",
    "wavy_hair", "wearing_scarf", "young", "attractive", "mouth_open",
)

PERSON_TAGS = ("people", "family", "portrait", "crowd", "man", "woman")
OBJECT_TAG_SYNONYMS = {
    "ball": "toy ball", "bicycle": "bike", "bottle": "flask", "car": "automobile",
    "chair": "seat", "dog": "puppy", "tree": "oak tree",
}
SCENE_TAGS = SCENE_CLASSES + ("outdoor", "indoor", "nature", "city")

OCR_WORDS = ("stop", "exit", "sale", "open", "taxi", "menu")

# caption templates; person templates lead with a person trigger phrase
PERSON_CAPTIONS = (
    "a family posing for a picture in the {scene}",
    "a man standing near a {obj} in the {scene}",
    "a woman smiling at the camera in the {scene}",
    "a group of people gathered around a {obj}",
    "a portrait of a person in front of a {obj}",
)
OBJECT_CAPTIONS = (
    "a {obj} in the middle of the {scene}",
    "an empty {scene} with a {obj}",
    "a close-up photo of a {obj}",
)

# group-size bucket sampling: (probability, inclusive count range)
_BUCKET_PLAN = (
    (0.06, (0, 0)),
    (0.40, (1, 1)),
    (0.22, (2, 2)),
    (0.20, (3, 6)),
    (0.07, (7, 12)),
    (0.04, (13, 30)),
    (0.01, (31, 45)),
)

PORTRAIT_PROB = 0.18
FACE_PER_PERSON_PROB = 0.8
EXTRA_FACE_PROB = 0.03


@dataclass
class SynthResult:
    records: list[ImageRecord]
    truth: dict


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _peaked_conf(rng: np.random.Generator, labels: tuple[str, ...], chosen: str) -> ConfVector:
    values = rng.dirichlet(np.full(len(labels), 0.5))
    values[labels.index(chosen)] += 2.0
    values = values / values.sum()
    return ConfVector(labels, values)


def _bbox(rng: np.random.Generator, width: int, height: int,
          min_frac: float = 0.04, max_frac: float = 0.35) -> tuple[float, float, float, float]:
    w = float(rng.uniform(min_frac, max_frac) * width)
    h = float(rng.uniform(min_frac, max_frac) * height)
    x = float(rng.uniform(0.0, width - w))
    y = float(rng.uniform(0.0, height - h))
    return (x, y, w, h)


def _portrait_bbox(rng: np.random.Generator, width: int, height: int,
                   ratio: float) -> tuple[float, float, float, float]:
    # exact target area keeps the planted portrait flag true after clamping
    area = ratio * width * height
    h = min(float(height), float(np.sqrt(area * rng.uniform(1.1, 1.4))))
    w = area / h
    if w > width:
        w = float(width)
        h = area / w
    x = float(rng.uniform(0.0, width - w))
    y = float(rng.uniform(0.0, height - h))
    return (x, y, w, h)


def _caption_anchors(dim: int) -> dict[str, np.ndarray]:
    rng = np.random.default_rng(4242)
    return {t: _unit(rng.normal(size=dim)) for t in PERSON_CAPTIONS + OBJECT_CAPTIONS}


def synthesize(
    n: int,
    seed: int,
    bins: int = 64,
    dups: int = 0,
    caption_dim: int = 32,
    cfg: ThresholdConfig = DEFAULT_THRESHOLDS,
) -> SynthResult:
    """Generate ``n`` records (plus ``dups`` exact duplicates) from ``seed``."""
    rng = np.random.default_rng(seed)
    anchors = _caption_anchors(caption_dim)

    # batched global draws
    dims_idx = rng.integers(0, len(DIMS), n)
    brightness = rng.beta(5.0, 3.0, n)
    saturation = rng.beta(2.5, 2.5, n)
    grayscale = rng.random(n) < 0.05
    gamma = rng.gamma(1.0, 1.0, (n, 3, bins))
    hists = gamma / gamma.sum(axis=2, keepdims=True)
    bg_depth = rng.uniform(0.3, 1.0, n)

    bucket_probs = np.asarray([p for p, _ in _BUCKET_PLAN])
    buckets = rng.choice(len(_BUCKET_PLAN), n, p=bucket_probs / bucket_probs.sum())

    records: list[ImageRecord] = []
    truth_images: dict[str, dict] = {}
    emotion_counts: dict[str, int] = {lbl: 0 for lbl in EMOTION_LABELS}

    for i in range(n):
        image_id = f"synth-{seed}-{i:05d}"
        width, height = DIMS[dims_idx[i]]
        lo, hi = _BUCKET_PLAN[buckets[i]][1]
        n_persons = int(rng.integers(lo, hi + 1)) if hi > lo else lo
        n_objects = int(rng.integers(0, 5))
        scene_class = SCENE_CLASSES[rng.integers(0, len(SCENE_CLASSES))]
        portrait = bool(rng.random() < PORTRAIT_PROB)

        instances: list[InstanceAnnotation] = []
        face_specs: list[tuple[float, float, float, float]] = []
        for p in range(n_persons):
            category = PERSON_CATEGORIES[rng.integers(0, len(PERSON_CATEGORIES))]
            box = _bbox(rng, width, height, 0.06, 0.4)
            instances.append(InstanceAnnotation(
                instance_id=f"obj{len(instances)}",
                kind="object",
                category=category,
                bbox=box,
                mean_depth=float(rng.uniform(0.15, 0.9)),
                detector_conf=float(rng.uniform(0.55, 1.0)),
            ))
            if rng.random() < FACE_PER_PERSON_PROB:
                # face roughly in the upper half of the person box
                fw = box[2] * rng.uniform(0.2, 0.5)
                fh = box[3] * rng.uniform(0.15, 0.35)
                fx = min(box[0] + rng.uniform(0.0, 0.5) * box[2], width - fw)
                fy = min(box[1] + rng.uniform(0.0, 0.2) * box[3], height - fh)
                face_specs.append((fx, fy, fw, fh))
        if rng.random() < EXTRA_FACE_PROB:
            face_specs.append(_bbox(rng, width, height, 0.04, 0.2))
        if portrait:
            ratio = float(rng.uniform(0.32, 0.55))
            big = _portrait_bbox(rng, width, height, ratio)
            if face_specs:
                face_specs[0] = big
            else:
                face_specs.append(big)

        emotions_here: list[str] = []
        for box in face_specs:
            emotion = str(rng.choice(EMOTION_LABELS, p=EMOTION_MIX))
            emotions_here.append(emotion)
            emotion_counts[emotion] += 1
            ethnicity = str(rng.choice(ETHNICITY_LABELS, p=ETHNICITY_MIX))
            gender_peak = float(rng.beta(6.0, 1.5))
            female_first = rng.random() < 0.5
            gender_values = np.asarray(
                [gender_peak, 1.0 - gender_peak] if female_first else [1.0 - gender_peak, gender_peak]
            )
            instances.append(InstanceAnnotation(
                instance_id=f"face{len([s for s in instances if s.kind == 'face'])}",
                kind="face",
                category="face",
                bbox=box,
                mean_depth=float(rng.uniform(0.1, 0.8)),
                age=float(np.clip(rng.normal(35.0, 15.0), 1.0, 95.0)),
                gender_conf=ConfVector(GENDER_LABELS, gender_values),
                ethnicity_conf=_peaked_conf(rng, ETHNICITY_LABELS, ethnicity),
                emotion_conf=_peaked_conf(rng, EMOTION_LABELS, emotion),
                attribute_conf=ConfVector(ATTRIBUTE_LABELS, rng.random(len(ATTRIBUTE_LABELS))),
                valence=float(np.clip(rng.normal(_VALENCE_MEAN[emotion], 0.18), -1.0, 1.0)),
                arousal=float(np.clip(rng.normal(_AROUSAL_MEAN[emotion], 0.18), -1.0, 1.0)),
                head_pose=tuple(float(v) for v in np.clip(rng.normal(0.0, 22.0, 3), -89.0, 89.0)),
                gaze=tuple(float(v) for v in np.clip(rng.normal(0.0, 25.0, 2), -89.0, 89.0)),
            ))

        seen_objects: list[str] = []
        for o in range(n_objects):
            category = OBJECT_CATEGORIES[rng.integers(0, len(OBJECT_CATEGORIES))]
            seen_objects.append(category)
            ocr = tuple(rng.choice(OCR_WORDS, size=rng.integers(1, 3), replace=False)) \
                if rng.random() < 0.1 else None
            instances.append(InstanceAnnotation(
                instance_id=f"obj{len([s for s in instances if s.kind == 'object'])}",
                kind="object",
                category=category,
                bbox=_bbox(rng, width, height),
                mean_depth=float(rng.uniform(0.1, 0.95)),
                detector_conf=float(rng.uniform(0.5, 1.0)),
                ocr_text=ocr,
            ))

        # tags correlate with content, with a little cross-model noise
        tag_pool: list[str] = [scene_class, "indoor" if scene_class in INDOOR_SCENES else "outdoor"]
        if n_persons > 0 and rng.random() > 0.03:
            tag_pool.extend(rng.choice(PERSON_TAGS, size=rng.integers(1, 3), replace=False))
        elif n_persons == 0 and rng.random() < 0.02:
            tag_pool.append("people")
        for category in sorted(set(seen_objects)):
            if rng.random() < 0.75:
                tag_pool.append(category if rng.random() < 0.5 else OBJECT_TAG_SYNONYMS[category])
        labels_unique = sorted(set(tag_pool))
        tags = tuple(TagEntry(lbl, float(rng.uniform(0.6, 1.0))) for lbl in labels_unique)

        # coverage: scene-flavored stuff classes plus person when people present
        n_classes = int(rng.integers(2, 6))
        classes = list(rng.choice(
            [c for c in COVERAGE_CLASSES if c != "person"], size=n_classes, replace=False
        ))
        if n_persons > 0 and rng.random() > 0.05:
            classes.append("person")
        fractions = rng.dirichlet(np.ones(len(classes))) * rng.uniform(0.75, 0.98)
        coverage = {c: float(f) for c, f in zip(classes, fractions)}

        if n_persons > 0:
            template = PERSON_CAPTIONS[rng.integers(0, len(PERSON_CAPTIONS))]
        else:
            template = OBJECT_CAPTIONS[rng.integers(0, len(OBJECT_CAPTIONS))]
        obj_word = seen_objects[0] if seen_objects else "bench"
        caption_text = template.format(scene=scene_class, obj=obj_word)
        embedding = _unit(anchors[template] + 0.35 * rng.normal(size=caption_dim))

        scene_conf = _peaked_conf(rng, SCENE_CLASSES, scene_class)
        palette_size = int(rng.integers(3, 6))
        weights = rng.dirichlet(np.ones(palette_size))
        palette = tuple(
            PaletteColor(tuple(float(v) for v in rng.uniform(0.0, 255.0, 3)), float(w))
            for w in weights
        )

        medium = str(rng.choice(
            ("photograph", "illustration", "map", "other"), p=(0.9, 0.06, 0.02, 0.02)
        ))
        record = ImageRecord(
            image_id=image_id,
            width=width,
            height=height,
            medium=medium,
            global_measures=GlobalMeasures(
                brightness=float(brightness[i]),
                saturation=float(saturation[i]),
                grayscale=bool(grayscale[i]),
                palette=palette,
                rgb_histograms=hists[i],
                background_mean_depth=float(bg_depth[i]),
            ),
            instances=tuple(instances),
            coverage=coverage,
            tags=tags,
            caption=CaptionEntry(caption_text, embedding),
            scene=SceneEntry(
                conf=scene_conf,
                indoor_outdoor="indoor" if scene_class in INDOOR_SCENES else "outdoor",
                manmade_natural="natural" if scene_class in NATURAL_SCENES else "manmade",
            ),
            image_ref=f"images/{image_id}.png",
        )
        records.append(record)
        truth_images[image_id] = {
            "persons": n_persons,
            "faces": len(face_specs),
            "objects": n_objects,
            "group": discretize_group_size(n_persons, cfg),
            "portrait": max(
                (inst.area / (width * height) for inst in instances if inst.kind == "face"),
                default=0.0,
            ) > cfg.portrait_ratio,
            "emotions": emotions_here,
            "scene": scene_class,
        }

    duplicates: list[list[str]] = []
    if dups > 0:
        origin_idx = rng.choice(n, size=min(dups, n), replace=False)
        for j, oi in enumerate(origin_idx):
            original = records[int(oi)]
            dup_id = f"{original.image_id}-dup{j}"
            records.append(dataclasses.replace(original, image_id=dup_id))
            duplicates.append([original.image_id, dup_id])
            truth_images[dup_id] = dict(truth_images[original.image_id])
            for emotion in truth_images[dup_id]["emotions"]:
                emotion_counts[emotion] += 1

    group_tally: dict[str, int] = {}
    for info in truth_images.values():
        group_tally[info["group"]] = group_tally.get(info["group"], 0) + 1

    truth = {
        "seed": seed,
        "n": n,
        "bins": bins,
        "duplicates": duplicates,
        "emotion_counts": emotion_counts,
        "group_counts": group_tally,
        "images": truth_images,
    }
    return SynthResult(records, truth)


# ---------------------------------------------------------------------------
# label embeddings

def _embedding_groups() -> list[tuple[str, ...]]:
    groups: list[tuple[str, ...]] = [
        ("person", "people", "man", "woman", "boy", "girl",
         "family", "crowd", "portrait", "selfie"),
    ]
    for category, synonym in OBJECT_TAG_SYNONYMS.items():
        groups.append((category, synonym))
    for single in SCENE_CLASSES + ("outdoor", "indoor", "nature", "city"):
        groups.append((single,))
    for single in ("sky", "grass", "road", "building", "water", "wall", "floor", "sand"):
        groups.append((single,))
    return groups


# synonym-to-anchor cosines cycle through these so the 0.80/0.85/0.90
# thresholds each cut off a different share of matches
_SYNONYM_COSINES = (0.82, 0.87, 0.92, 0.96)


def make_embedding_table(dim: int = 32, seed: int = 99) -> EmbeddingTable:
    """Unit embeddings where synonyms sit at controlled cosines to an anchor."""
    rng = np.random.default_rng(seed)
    vectors: dict[str, np.ndarray] = {}
    for g, group in enumerate(_embedding_groups()):
        anchor = _unit(rng.normal(size=dim))
        for k, label in enumerate(group):
            if k == 0:
                vectors[label] = anchor
                continue
            target = _SYNONYM_COSINES[(g + k - 1) % len(_SYNONYM_COSINES)]
            noise = rng.normal(size=dim)
            noise -= np.dot(noise, anchor) * anchor
            noise = _unit(noise)
            t = np.sqrt(1.0 / target**2 - 1.0)
            vectors[label] = _unit(anchor + t * noise)
    return EmbeddingTable(dim, vectors)
