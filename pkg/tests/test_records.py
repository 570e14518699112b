import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fresco.errors import InvariantViolation, MalformedRecord, SchemaViolation
from fresco.records import (
    EmbeddingTable,
    load_embedding_table,
    parse_record,
    record_to_dict,
    save_embedding_table,
    serialize_record,
    validate_archive,
)
from fresco.synth import synthesize

from .conftest import flat_hist, make_face, make_object, make_record


def test_minimal_record_parses():
    line = serialize_record(make_record(width=100, height=100))
    record = parse_record(line)
    assert record.width == 100 and record.height == 100
    assert record.instances == ()


def test_unnormalized_histogram_rejected():
    bad = flat_hist() * 0.5
    line = serialize_record(make_record(hist=bad))
    with pytest.raises(InvariantViolation) as err:
        parse_record(line)
    assert err.value.field == "rgb_histograms"


def test_malformed_line():
    with pytest.raises(MalformedRecord):
        parse_record("{not json")


def test_missing_field_names_the_field():
    obj = record_to_dict(make_record())
    del obj["caption"]
    with pytest.raises(SchemaViolation) as err:
        parse_record(json.dumps(obj))
    assert err.value.field == "caption"


def test_unknown_fields_preserved():
    obj = record_to_dict(make_record())
    obj["future_field"] = {"x": 1}
    record = parse_record(json.dumps(obj))
    assert record.extras == {"future_field": {"x": 1}}
    assert json.loads(serialize_record(record))["future_field"] == {"x": 1}


def test_bbox_outside_bounds_rejected():
    record = make_record(instances=[make_object(bbox=(90.0, 90.0, 20.0, 20.0))])
    with pytest.raises(InvariantViolation) as err:
        parse_record(serialize_record(record))
    assert err.value.field == "bbox"


def test_duplicate_id_violation():
    records = [make_record("x"), make_record("x")]
    violations = validate_archive(records)
    assert [v.kind for v in violations] == ["duplicate_id"]
    assert violations[0].image_id == "x"


def test_valid_archive_is_clean():
    records = [make_record(f"r{i}") for i in range(3)]
    assert validate_archive(records) == []


def test_valence_range_violation():
    record = make_record(instances=[make_face(valence=1.5)])
    violations = validate_archive([record])
    assert any(v.kind == "range" and v.field == "valence" for v in violations)


def test_mixed_bin_archives_rejected():
    records = [make_record("a", hist=flat_hist(8)), make_record("b", hist=flat_hist(16))]
    violations = validate_archive(records)
    assert any(v.kind == "bins" for v in violations)


def test_mixed_label_spaces_rejected():
    import dataclasses

    from fresco.records import ConfVector

    good = make_record("a", instances=[make_face()])
    odd_face = dataclasses.replace(
        make_face(),
        ethnicity_conf=ConfVector(("one", "two", "three", "four", "five"), np.full(5, 0.2)),
    )
    violations = validate_archive([good, make_record("b", instances=[odd_face])])
    assert any(v.kind == "label_space" for v in violations)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_round_trip_identity_on_synthetic(seed):
    record = synthesize(1, seed=seed).records[0]
    line = serialize_record(record)
    assert serialize_record(parse_record(line)) == line


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_generator_output_always_validates(seed):
    result = synthesize(4, seed=seed, dups=0)
    assert validate_archive(result.records) == []


def test_embedding_table_round_trip(tmp_path):
    table = EmbeddingTable(3, {
        "a": np.asarray([1.0, 0.0, 0.0]),
        "b": np.asarray([0.0, 1.0, 0.0]),
    })
    path = tmp_path / "emb.tsv"
    save_embedding_table(table, str(path))
    loaded = load_embedding_table(str(path))
    assert loaded.dim == 3
    assert np.array_equal(loaded["a"], table["a"])


def test_embedding_table_requires_unit_norm():
    with pytest.raises(InvariantViolation):
        EmbeddingTable(2, {"a": np.asarray([1.0, 1.0])})


def test_embedding_table_requires_header(tmp_path):
    path = tmp_path / "emb.tsv"
    path.write_text("not a header\n")
    with pytest.raises(MalformedRecord):
        load_embedding_table(str(path))
