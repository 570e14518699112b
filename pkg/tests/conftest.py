import numpy as np
import pytest

from fresco import archive as arc
from fresco.records import (
    CaptionEntry,
    ConfVector,
    GlobalMeasures,
    ImageRecord,
    InstanceAnnotation,
    PaletteColor,
    SceneEntry,
    TagEntry,
)
from fresco.scoring import Scorer
from fresco.synth import synthesize

GENDERS = ("female", "male")
ETHNICITIES = ("asian", "black", "indian", "latino", "white")
EMOTIONS = ("happy", "neutral", "fear", "sadness", "disgust")
ATTRS = tuple(f"attr{i}" for i in range(8))
SCENES = ("beach", "kitchen", "street")


def flat_hist(bins: int = 8) -> np.ndarray:
    return np.full((3, bins), 1.0 / bins)


def make_face(
    instance_id: str = "face0",
    bbox=(10.0, 10.0, 20.0, 20.0),
    mean_depth: float = 0.4,
    age: float = 30.0,
    emotion: str = "happy",
    valence: float = 0.5,
    arousal: float = 0.2,
    head_pose=(0.0, 0.0, 0.0),
    gaze=(0.0, 0.0),
    gender=(0.8, 0.2),
    ethnicity=(0.1, 0.1, 0.1, 0.1, 0.6),
    attrs=None,
) -> InstanceAnnotation:
    emotion_values = np.full(len(EMOTIONS), 0.05)
    emotion_values[EMOTIONS.index(emotion)] = 1.0 - 0.05 * (len(EMOTIONS) - 1)
    return InstanceAnnotation(
        instance_id=instance_id,
        kind="face",
        category="face",
        bbox=tuple(float(v) for v in bbox),
        mean_depth=mean_depth,
        age=age,
        gender_conf=ConfVector(GENDERS, np.asarray(gender, dtype=float)),
        ethnicity_conf=ConfVector(ETHNICITIES, np.asarray(ethnicity, dtype=float)),
        emotion_conf=ConfVector(EMOTIONS, emotion_values),
        attribute_conf=ConfVector(
            ATTRS, np.asarray(attrs if attrs is not None else [0.5] * len(ATTRS), dtype=float)
        ),
        valence=valence,
        arousal=arousal,
        head_pose=tuple(float(v) for v in head_pose),
        gaze=tuple(float(v) for v in gaze),
    )


def make_object(
    instance_id: str = "obj0",
    category: str = "car",
    bbox=(40.0, 40.0, 30.0, 20.0),
    mean_depth: float = 0.6,
    detector_conf: float = 0.9,
    ocr_text=None,
) -> InstanceAnnotation:
    return InstanceAnnotation(
        instance_id=instance_id,
        kind="object",
        category=category,
        bbox=tuple(float(v) for v in bbox),
        mean_depth=mean_depth,
        detector_conf=detector_conf,
        ocr_text=tuple(ocr_text) if ocr_text is not None else None,
    )


def make_record(
    image_id: str = "img",
    width: int = 100,
    height: int = 100,
    instances=(),
    brightness: float = 0.5,
    saturation: float = 0.5,
    grayscale: bool = False,
    palette=((128.0, 128.0, 128.0),),
    hist: np.ndarray | None = None,
    background_depth: float = 0.7,
    coverage=None,
    tags=("street",),
    caption_text: str = "a photo",
    caption_embedding=(1.0, 0.0, 0.0, 0.0),
    scene: str = "street",
    indoor_outdoor: str = "outdoor",
    manmade_natural: str = "manmade",
    medium: str = "photograph",
) -> ImageRecord:
    scene_values = np.full(len(SCENES), 0.1)
    scene_values[SCENES.index(scene)] = 1.0 - 0.1 * (len(SCENES) - 1)
    weight = 1.0 / len(palette)
    return ImageRecord(
        image_id=image_id,
        width=width,
        height=height,
        medium=medium,
        global_measures=GlobalMeasures(
            brightness=brightness,
            saturation=saturation,
            grayscale=grayscale,
            palette=tuple(PaletteColor(tuple(map(float, rgb)), weight) for rgb in palette),
            rgb_histograms=hist if hist is not None else flat_hist(),
            background_mean_depth=background_depth,
        ),
        instances=tuple(instances),
        coverage=dict(coverage) if coverage else {"sky": 0.4, "road": 0.3},
        tags=tuple(TagEntry(t) for t in tags),
        caption=CaptionEntry(caption_text, np.asarray(caption_embedding, dtype=float)),
        scene=SceneEntry(
            conf=ConfVector(SCENES, scene_values),
            indoor_outdoor=indoor_outdoor,
            manmade_natural=manmade_natural,
        ),
    )


@pytest.fixture(scope="session")
def small_result():
    return synthesize(60, seed=11, dups=2)


@pytest.fixture(scope="session")
def small_records(small_result):
    return small_result.records


@pytest.fixture(scope="session")
def small_archive(small_records):
    return arc.build(small_records)


@pytest.fixture(scope="session")
def scorer():
    return Scorer()
