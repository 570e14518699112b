from fresco.records import serialize_record, validate_archive
from fresco.synth import make_embedding_table, synthesize
from fresco.traits import derive_traits


def test_deterministic_bytes():
    a = synthesize(20, seed=5, dups=2)
    b = synthesize(20, seed=5, dups=2)
    assert [serialize_record(r) for r in a.records] == [serialize_record(r) for r in b.records]
    assert a.truth == b.truth


def test_different_seeds_differ():
    a = synthesize(5, seed=1)
    b = synthesize(5, seed=2)
    assert serialize_record(a.records[0]) != serialize_record(b.records[0])


def test_truth_matches_derivation(small_result):
    truth = small_result.truth
    for record in small_result.records:
        info = truth["images"][record.image_id]
        traits = derive_traits(record)
        assert traits.image["2.2.1.1"] == info["persons"]
        assert traits.image["2.2.1.1-group"] == info["group"]
        assert (traits.image["3.1.3-class"] == "portrait") == info["portrait"]
        assert len(record.faces()) == info["faces"]
        got_emotions = sorted(
            traits.instances[i.instance_id]["2.5.2-label"] for i in record.faces()
        )
        assert got_emotions == sorted(info["emotions"])


def test_duplicates_recorded(small_result):
    ids = {r.image_id for r in small_result.records}
    for original, duplicate in small_result.truth["duplicates"]:
        assert original in ids and duplicate in ids


def test_emotion_counts_align(small_result):
    tally = {}
    for record in small_result.records:
        for face in record.faces():
            label = face.emotion_conf.argmax_label()
            tally[label] = tally.get(label, 0) + 1
    expected = {k: v for k, v in small_result.truth["emotion_counts"].items() if v}
    assert tally == expected


def test_archive_is_always_valid(small_result):
    assert validate_archive(small_result.records) == []


def test_embedding_table_covers_vocab(small_result):
    emb = make_embedding_table()
    for record in small_result.records:
        for tag in record.tag_labels():
            assert tag in emb
        for inst in record.objects():
            assert inst.category in emb
        for label in record.coverage:
            assert label in emb
