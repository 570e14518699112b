import dataclasses

import numpy as np
import pytest

from fresco.errors import RegistryMismatch, UnknownMeasure
from fresco.records import CaptionEntry
from fresco.scoring import (
    Scorer,
    WeightConfig,
    fresco_score,
    level_score,
    measure_score,
)

from .conftest import make_face, make_record


def walk_values(root):
    return {node.path: node.similarity for node in root.walk()}


def test_self_score_is_all_ones(small_records):
    for record in small_records[:20]:
        breakdown = fresco_score(record, record)
        assert breakdown.similarity == 1.0
        assert all(node.similarity == 1.0 for node in breakdown.root.walk())


def test_symmetry_at_every_node(small_records):
    a, b = small_records[3], small_records[4]
    ab = walk_values(fresco_score(a, b).root)
    ba = walk_values(fresco_score(b, a).root)
    assert ab.keys() == ba.keys()
    for path, value in ab.items():
        assert abs(value - ba[path]) <= 1e-9


def test_all_node_values_bounded(small_records):
    for a, b in zip(small_records[:8], small_records[8:16]):
        for node in fresco_score(a, b).root.walk():
            assert 0.0 <= node.similarity <= 1.0


def test_parent_is_weighted_mean_of_children(small_records):
    breakdown = fresco_score(small_records[0], small_records[1])

    def audit(node):
        if not node.children:
            return
        num = sum(c.weight * c.similarity for c in node.children if c.weight > 0)
        den = sum(c.weight for c in node.children if c.weight > 0)
        if den > 0:
            assert node.similarity == pytest.approx(num / den, abs=1e-12)
        for child in node.children:
            audit(child)

    audit(breakdown.root)


def test_weight_scaling_leaves_score_unchanged(small_records):
    a, b = small_records[5], small_records[9]
    base = fresco_score(a, b, weights=WeightConfig(1.0, 1.0, 1.0)).similarity
    for k in (0.5, 2.0, 17.0):
        scaled = fresco_score(a, b, weights=WeightConfig(k, k, k)).similarity
        assert scaled == pytest.approx(base, abs=1e-12)


def test_zero_weight_level_excluded(small_records):
    a, b = small_records[2], small_records[6]
    plastic_only = WeightConfig(1.0, 0.0, 0.0)
    before = fresco_score(a, b, weights=plastic_only).similarity
    # permute figurative-only fields of b: swap caption embedding and tags
    changed = dataclasses.replace(
        b,
        caption=CaptionEntry("changed", -np.asarray(b.caption.embedding)),
        tags=(),
    )
    after = fresco_score(a, changed, weights=plastic_only).similarity
    assert after == before


def test_unmatched_instances_penalize():
    a = make_record("a", instances=[make_face("f0")])
    b = make_record("b")
    breakdown = fresco_score(a, b)
    ratios = breakdown.root.find("plastic/topological/1.3.1")
    assert ratios is not None
    assert ratios.similarity == 0.0  # single unmatched slot contributes 0
    leaf = breakdown.root.find("plastic/topological/1.3.1/f0~")
    assert leaf is not None and leaf.similarity == 0.0


def test_face_measures_vacuous_without_faces():
    a = make_record("a")
    b = make_record("b")
    breakdown = fresco_score(a, b)
    age = breakdown.root.find("figurative/people/2.2.2.2")
    assert age is not None and age.similarity == 1.0


def test_level_scores():
    a = make_record("a", instances=[make_face("fa")])
    b = make_record("b", instances=[make_face("fb")])
    assert level_score(a, a, "plastic") == 1.0
    assert level_score(a, b, "enunciational") == 1.0

    # caption is figurative; plastic level must ignore it
    changed = dataclasses.replace(b, caption=CaptionEntry("x", np.asarray([0.0, 1.0, 0.0, 0.0])))
    assert level_score(a, changed, "plastic") == level_score(a, b, "plastic")


def test_gaze_yaw_leaf_value():
    a = make_record("a", instances=[make_face("fa", gaze=(0.0, 0.0))])
    b = make_record("b", instances=[make_face("fb", gaze=(90.0, 0.0))])
    breakdown = fresco_score(a, b)
    leaf = breakdown.root.find("enunciational/pose_gaze/3.2.3-yaw/fa~fb")
    assert leaf is not None
    assert leaf.similarity == 0.5  # 1 - 90/180 under range (-90, 90)
    assert measure_score(a, b, "3.2.3-yaw") == 0.5


def test_measure_scores():
    a = make_record("a", tags=("car",))
    b = make_record("b", tags=("car", "tree"))
    assert measure_score(a, b, "2.1.1") == 0.5
    assert measure_score(a, a, "1.2.1-histogram") == 1.0

    happy = make_record("h", instances=[make_face("f", emotion="happy")])
    sad = make_record("s", instances=[make_face("f", emotion="sadness")])
    value = measure_score(happy, sad, "2.5.2")
    assert value < 0.2  # nearly orthogonal peaked confidence vectors

    one_hot_a = make_record("oa", instances=[make_face("f")])
    one_hot_b = make_record("ob", instances=[make_face("f")])
    conf_a = np.zeros(5); conf_a[0] = 1.0
    conf_b = np.zeros(5); conf_b[1] = 1.0
    fa = dataclasses.replace(one_hot_a.instances[0], emotion_conf=dataclasses.replace(
        one_hot_a.instances[0].emotion_conf, values=conf_a))
    fb = dataclasses.replace(one_hot_b.instances[0], emotion_conf=dataclasses.replace(
        one_hot_b.instances[0].emotion_conf, values=conf_b))
    one_hot_a = dataclasses.replace(one_hot_a, instances=(fa,))
    one_hot_b = dataclasses.replace(one_hot_b, instances=(fb,))
    assert measure_score(one_hot_a, one_hot_b, "2.5.2") == 0.0


def test_unknown_measure():
    a = make_record("a")
    with pytest.raises(UnknownMeasure):
        measure_score(a, a, "9.9.9")


def test_exclude_unpaired_mode():
    near = make_face("fa", bbox=(10.0, 10.0, 20.0, 20.0), age=30.0)
    far = make_face("fb", bbox=(70.0, 70.0, 20.0, 20.0), age=50.0)
    a = make_record("a", instances=[near, far])
    b = make_record("b", instances=[make_face("fc", bbox=(10.0, 10.0, 20.0, 20.0), age=30.0)])
    # matched pair is (fa, fc): identical ages -> 1.0; with the unmatched
    # slot included the mean over max(2, 1) slots halves it
    assert measure_score(a, b, "2.2.2.2", include_unpaired=False) == 1.0
    assert measure_score(a, b, "2.2.2.2", include_unpaired=True) == 0.5


def test_registry_mismatch():
    from fresco.registry import Registry, default_registry

    s1 = Scorer()
    trimmed = Registry(default_registry().descriptors[:-1])
    s2 = Scorer(trimmed)
    a = s1.prepare(make_record("a"))
    b = s2.prepare(make_record("b"))
    with pytest.raises(RegistryMismatch):
        s1.score_pair(a, b)


def test_same_content_registries_are_compatible():
    from fresco.registry import load_registry

    s1 = Scorer(load_registry())
    s2 = Scorer(load_registry())
    a = s1.prepare(make_record("a"))
    b = s2.prepare(make_record("b"))
    pair, _, _ = s1.score_pair(a, b)
    assert 0.0 <= pair.similarity <= 1.0


def test_breakdown_is_canonical(small_records):
    a, b = small_records[10], small_records[11]
    ab = fresco_score(a, b)
    ba = fresco_score(b, a)
    assert ab.to_json() == ba.to_json()
    assert ab.first_id <= ab.second_id


def test_group_weight_override(small_records):
    a, b = small_records[1], small_records[7]
    weights = WeightConfig(node_weights={"plastic/chromatic": 0.0})
    breakdown = fresco_score(a, b, weights=weights)
    plastic = breakdown.root.find("plastic")
    topological = breakdown.root.find("plastic/topological")
    assert plastic.similarity == pytest.approx(topological.similarity, abs=1e-12)
