import numpy as np
import pytest

from fresco.consistency import (
    DEFAULT_SYNSETS,
    group_distribution,
    overlap_report,
    parse_task_pair,
    people_presence,
    render_group_table,
    render_overlap_table,
    render_presence_table,
    task_labels,
    topic_overlap,
)
from fresco.errors import EmptyArchive, MissingEmbedding, UnknownTask, UnsupportedTask
from fresco.records import EmbeddingTable
from fresco.synth import make_embedding_table
from fresco.traits import GROUP_SIZES

from .conftest import make_face, make_object, make_record


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


@pytest.fixture(scope="module")
def emb():
    return make_embedding_table()


def test_presence_all_faces():
    records = [make_record(f"r{i}", instances=[make_face()]) for i in range(4)]
    stats = people_presence(records, DEFAULT_SYNSETS, "face_detection")
    assert stats.presence_fraction == 1.0
    assert stats.mean_count == 1.0


def test_presence_empty_archive():
    with pytest.raises(EmptyArchive):
        people_presence([], DEFAULT_SYNSETS, "face_detection")


def test_presence_unknown_and_unsupported_tasks():
    records = [make_record()]
    with pytest.raises(UnknownTask):
        people_presence(records, DEFAULT_SYNSETS, "pose")
    with pytest.raises(UnsupportedTask):
        people_presence(records, DEFAULT_SYNSETS, "panoptic")


def test_presence_only_tasks_report_no_count():
    records = [make_record("a", tags=("people", "street")), make_record("b")]
    stats = people_presence(records, DEFAULT_SYNSETS, "tagging")
    assert stats.mean_count is None
    assert stats.presence_fraction == 0.5


def test_caption_trigger_phrases():
    records = [
        make_record("a", caption_text="A family posing for a picture"),
        make_record("b", caption_text="An empty street at dawn"),
    ]
    stats = people_presence(records, DEFAULT_SYNSETS, "captioning")
    assert stats.presence_fraction == 0.5


def test_group_distribution_solo_portraits():
    records = [
        make_record(f"r{i}", instances=[make_object(category="person")])
        for i in range(5)
    ]
    dist = group_distribution(records)
    assert dist["single"] == 1.0
    assert sum(dist.values()) == pytest.approx(1.0, abs=1e-12)


def test_group_distribution_matches_truth(small_result):
    dist = group_distribution(small_result.records)
    counts = {label: 0 for label in GROUP_SIZES}
    for info in small_result.truth["images"].values():
        counts[info["group"]] += 1
    total = len(small_result.records)
    for label in GROUP_SIZES:
        assert dist[label] == pytest.approx(counts[label] / total, abs=1e-12)


def test_group_distribution_rejects_presence_only():
    with pytest.raises(UnsupportedTask):
        group_distribution([make_record()], "tagging")


# -- topic overlap ---------------------------------------------------------


def test_083_case_matches_at_080_and_splits_at_085():
    # two labels whose cosine is exactly 0.83
    base = np.zeros(4)
    base[0] = 1.0
    other = 0.83 * base + np.sqrt(1 - 0.83**2) * np.asarray([0.0, 1.0, 0.0, 0.0])
    table = EmbeddingTable(4, {"car": base, "land vehicle": unit(other)})
    assert float(np.dot(table["car"], table["land vehicle"])) == pytest.approx(0.83, abs=1e-9)

    first, common, second = topic_overlap({"car"}, {"land vehicle"}, table, 0.80)
    assert (first, common, second) == (0, 1, 0)
    first, common, second = topic_overlap({"car"}, {"land vehicle"}, table, 0.85)
    assert (first, common, second) == (1, 0, 1)


def test_identical_labels_always_common(emb):
    labels = {"car", "dog", "person"}
    first, common, second = topic_overlap(labels, labels, emb, 0.99)
    assert (first, common, second) == (0, 3, 0)


def test_disjoint_low_similarity_labels(emb):
    first, common, second = topic_overlap({"sky"}, {"bottle"}, emb, 0.80)
    assert (first, common, second) == (1, 0, 1)


def test_label_conservation(emb):
    la = {"car", "tree", "sky"}
    lb = {"automobile", "oak tree"}
    for tau in (0.8, 0.85, 0.9, 0.99):
        first, common, second = topic_overlap(la, lb, emb, tau)
        assert first + common == len(la)
        assert second + common == len(lb)


def test_missing_embedding(emb):
    with pytest.raises(MissingEmbedding):
        topic_overlap({"car"}, {"no-such-label"}, emb, 0.8)


def test_one_to_one_matching(emb):
    # two near-synonyms on one side compete for a single label
    first, common, second = topic_overlap({"car"}, {"automobile", "car"}, emb, 0.8)
    assert common == 1
    assert second == 1


def test_overlap_report_monotone_and_normalized(small_result, emb):
    report = overlap_report(
        small_result.records, ("tagging", "object_detection"), emb, (0.80, 0.85, 0.90)
    )
    commons = [row.fractions[1] for row in report.rows]
    assert commons[0] >= commons[1] >= commons[2]
    for row in report.rows:
        assert sum(row.fractions) == pytest.approx(1.0, abs=1e-4)


def test_overlap_report_containment_gives_zero_second(emb):
    # every record's object categories strictly contain its tag labels
    records = [
        make_record(
            f"r{i}",
            tags=("car",),
            instances=[
                make_object("o0", category="car"),
                make_object("o1", category="dog", bbox=(5.0, 5.0, 10.0, 10.0)),
            ],
        )
        for i in range(3)
    ]
    report = overlap_report(records, ("object_detection", "tagging"), emb)
    for row in report.rows:
        assert row.fractions[2] == 0.0


def test_single_image_report_reduces_to_topic_overlap(small_result, emb):
    record = small_result.records[0]
    report = overlap_report([record], ("tagging", "object_detection"), emb, (0.85,))
    direct = topic_overlap(
        task_labels(record, "tagging"), task_labels(record, "object_detection"), emb, 0.85
    )
    row = report.rows[0]
    assert (row.first_only, row.common, row.second_only) == direct


def test_task_pair_parsing():
    assert parse_task_pair("tags-objects") == ("tagging", "object_detection")
    assert parse_task_pair("objects-semantic") == ("object_detection", "semantic")
    with pytest.raises(UnknownTask):
        parse_task_pair("tags")
    with pytest.raises(UnknownTask):
        parse_task_pair("tags-poses")


def test_renderers_produce_aligned_tables(small_result, emb):
    stats = [people_presence(small_result.records, DEFAULT_SYNSETS, t)
             for t in ("face_detection", "object_detection", "tagging")]
    text = render_presence_table(stats)
    assert "face_detection" in text and "%" in text

    dists = {t: group_distribution(small_result.records, t)
             for t in ("face_detection", "object_detection")}
    text = render_group_table(dists)
    assert "couple" in text

    report = overlap_report(small_result.records, ("tagging", "object_detection"), emb)
    text = render_overlap_table(report)
    assert "In common" in text
