import csv
import json

import numpy as np
import pytest

from fresco import archive as arc
from fresco.errors import DuplicateId, InvariantViolation, UnknownImage, UnknownMeasure
from fresco.scoring import score_prepared

from .conftest import make_face, make_record


def test_build_empty():
    archive = arc.build([])
    assert len(archive) == 0


def test_build_rejects_duplicate_ids():
    with pytest.raises(DuplicateId):
        arc.build([make_record("x"), make_record("x")])


def test_build_rejects_invalid_records():
    bad = make_record("a", instances=[make_face(valence=2.0)])
    with pytest.raises(InvariantViolation):
        arc.build([bad])


def test_rank_excludes_reference(small_archive):
    reference = small_archive.ids()[0]
    ranked = small_archive.rank(reference, k=1000)
    assert reference not in [e.image_id for e in ranked.entries]
    assert len(ranked.entries) == len(small_archive) - 1


def test_rank_unknown_reference(small_archive):
    with pytest.raises(UnknownImage):
        small_archive.rank("nope")


def test_rank_k_validation(small_archive):
    with pytest.raises(ValueError):
        small_archive.rank(small_archive.ids()[0], k=0)


def test_duplicate_ranks_first(small_archive, small_result):
    original, duplicate = small_result.truth["duplicates"][0]
    ranked = small_archive.rank(original, k=3)
    assert ranked.entries[0].image_id == duplicate
    assert ranked.entries[0].similarity == 1.0


def test_rank_entries_sorted_descending(small_archive):
    ranked = small_archive.rank(small_archive.ids()[3], k=20)
    sims = [e.similarity for e in ranked.entries]
    assert sims == sorted(sims, reverse=True)


def test_rank_deterministic_bytes(small_archive):
    reference = small_archive.ids()[1]
    first = json.dumps(small_archive.rank(reference, k=10).to_json())
    second = json.dumps(small_archive.rank(reference, k=10).to_json())
    assert first == second


def test_windows_partition(small_archive):
    reference = small_archive.ids()[2]
    n = len(small_archive) - 1
    everything = small_archive.rank(reference, k=n)
    top = small_archive.rank(reference, k=8, window="top")
    last = small_archive.rank(reference, k=8, window="last")
    median = small_archive.rank(reference, k=8, window="median")
    ordered = [e.image_id for e in everything.entries]
    assert [e.image_id for e in top.entries] == ordered[:8]
    assert [e.image_id for e in last.entries] == ordered[-8:]
    start = (n - 8) // 2
    assert [e.image_id for e in median.entries] == ordered[start:start + 8]
    # last-k holds exactly the k lowest similarities: the top-k under 1 - sim
    inverted_top = sorted((1.0 - e.similarity for e in everything.entries), reverse=True)[:8]
    assert sorted(1.0 - e.similarity for e in last.entries) == sorted(inverted_top)


def test_rank_top1_matches_exhaustive_oracle(small_archive):
    reference_id = small_archive.ids()[5]
    reference = small_archive.get(reference_id)
    best_id, best_sim = None, -1.0
    for candidate in small_archive.prepared:
        if candidate.record.image_id == reference_id:
            continue
        sim = score_prepared(reference, candidate, scorer=small_archive.scorer).similarity
        if sim > best_sim or (sim == best_sim and candidate.record.image_id < best_id):
            best_id, best_sim = candidate.record.image_id, sim
    ranked = small_archive.rank(reference_id, k=1)
    assert ranked.entries[0].image_id == best_id
    assert ranked.entries[0].similarity == best_sim


def test_rank_ordering_invariant_under_weight_scaling(small_archive):
    from fresco.scoring import WeightConfig

    reference = small_archive.ids()[6]
    base = small_archive.rank(reference, WeightConfig(1.0, 1.0, 1.0), k=20)
    scaled = small_archive.rank(reference, WeightConfig(3.0, 3.0, 3.0), k=20)
    assert [e.image_id for e in base.entries] == [e.image_id for e in scaled.entries]
    for a, b in zip(base.entries, scaled.entries):
        assert a.similarity == pytest.approx(b.similarity, abs=1e-12)


def test_parallel_rank_identical(small_archive):
    reference = small_archive.ids()[4]
    serial = small_archive.rank(reference, k=12, workers=1)
    parallel = small_archive.rank(reference, k=12, workers=2)
    assert [(e.image_id, e.similarity) for e in serial.entries] == \
        [(e.image_id, e.similarity) for e in parallel.entries]


def test_rank_by_measure_histogram_identical_first(small_archive, small_records):
    import dataclasses

    base = small_records[0]
    twin = dataclasses.replace(
        base,
        image_id="hist-twin",
        instances=(),
        tags=(),
        coverage={"sky": 0.1},
    )
    records = list(small_records) + [twin]
    archive = arc.build(records)
    ranked = archive.rank_by_measure(base.image_id, "1.2.1-histogram", k=1)
    assert ranked.entries[0].image_id == "hist-twin"
    assert ranked.entries[0].similarity == 1.0


def test_rank_by_measure_unknown(small_archive):
    with pytest.raises(UnknownMeasure):
        small_archive.rank_by_measure(small_archive.ids()[0], "no.such", k=3)


def test_rank_by_gaze_sorts_by_angle_difference(small_archive):
    records = [make_record("ref", instances=[make_face("f", gaze=(0.0, 0.0))])]
    for k, yaw in enumerate((5.0, 45.0, 85.0)):
        records.append(
            make_record(f"c{k}", instances=[make_face("f", gaze=(yaw, 0.0))])
        )
    archive = arc.build(records)
    ranked = archive.rank_by_measure("ref", "3.2.3-yaw", k=3)
    assert [e.image_id for e in ranked.entries] == ["c0", "c1", "c2"]


def test_distribution_single_spike():
    records = [make_record(f"r{i}", brightness=0.5) for i in range(6)]
    archive = arc.build(records)
    dist = archive.distribution("1.2.2", bins=10)
    assert dist.kind == "histogram"
    assert max(dist.fractions) == 1.0
    assert sum(dist.fractions) == pytest.approx(1.0, abs=1e-12)


def test_distribution_age_range(small_archive):
    dist = small_archive.distribution("2.2.2.2", bins=10)
    assert dist.bin_edges[0] == 0.0 and dist.bin_edges[-1] == 100.0


def test_distribution_emotion_tally_matches_truth(small_archive, small_result):
    dist = small_archive.distribution("2.5.2-label")
    expected = {k: v for k, v in small_result.truth["emotion_counts"].items() if v}
    total = sum(expected.values())
    assert dist.tally == pytest.approx({k: v / total for k, v in expected.items()})


def test_distribution_unknown_measure(small_archive):
    with pytest.raises(UnknownMeasure):
        small_archive.distribution("nope")
    with pytest.raises(UnknownMeasure):
        small_archive.distribution("1.2.1-palette")  # no scalar distribution


def test_export_empty(tmp_path):
    archive = arc.build([])
    path = tmp_path / "out.csv"
    assert archive.export_table(str(path)) == 0
    lines = path.read_text().splitlines()
    assert len(lines) == 1 and lines[0].startswith("image_id,")


def test_export_reimport_reproduces_distribution(tmp_path, small_archive):
    path = tmp_path / "table.csv"
    rows = small_archive.export_table(str(path))
    assert rows == len(small_archive)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        values = [float(row["1.2.2"]) for row in reader]
    direct = small_archive.distribution("1.2.2", bins=10)
    counts, _ = np.histogram(np.asarray(values), bins=10, range=(0.0, 1.0))
    assert tuple(counts / counts.sum()) == direct.fractions


def test_export_writes_column_dictionary(tmp_path, small_archive):
    path = tmp_path / "table.csv"
    small_archive.export_table(str(path))
    dictionary = (tmp_path / "table.csv.columns.csv").read_text().splitlines()
    header = (tmp_path / "table.csv").read_text().splitlines()[0]
    assert dictionary[0] == "column,description"
    assert len(dictionary) - 1 == len(header.split(","))


def test_throughput_scales_linearly():
    import time

    from fresco.synth import synthesize

    def build_and_rank(n, seed):
        records = synthesize(n, seed=seed).records
        t0 = time.perf_counter()
        archive = arc.build(records)
        archive.rank(archive.ids()[0], k=8)
        return time.perf_counter() - t0

    t_small = min(build_and_rank(250, 21) for _ in range(2))
    t_large = build_and_rank(2500, 22)
    ratio = t_large / t_small
    assert 10 / 2 <= ratio <= 10 * 2, f"scaling ratio {ratio:.1f} outside [5, 20]"
