from __future__ import annotations

import dataclasses
import json
import random
import threading
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ovc.aas import (
    CorruptStore,
    DanglingReferenceWarning,
    DuplicateIdShort,
    FileElement,
    IoFailure,
    MalformedEntity,
    NotAFile,
    NotAProperty,
    NotFound,
    Property,
    Reference,
    RelationshipElement,
    Repository,
    Shell,
    Submodel,
    ValueTypeMismatch,
    load_repository,
    serialize_repository,
)
from ovc.aas.store import decode_id, encode_id
from ovc.demo import INFO_SUBMODEL_ID, RESULT_SUBMODEL_ID, TEMPERATURE_ID_SHORT, TYPE_FIXTURE, fixture_bytes
from ovc.model import DataType, value_matches
from strategies import random_repository

SM = "urn:sm:1"


@pytest.fixture
def repo(tmp_path):
    r = Repository(tmp_path / "s")
    r.put_submodel(
        Submodel(
            SM,
            "Semantic_Information_Models",
            (
                Property("temp", DataType.REAL, 22.5),
                FileElement("file", "application/xml", "t.aml"),
            ),
        )
    )
    return r


def test_put_and_upsert(repo):
    shell = Shell("urn:aas:1", "AAS1", (SM,))
    repo.put_shell(shell)
    repo.put_shell(dataclasses.replace(shell, id_short="Renamed"))
    assert [s.id_short for s in repo.shells()] == ["Renamed"]
    assert repo.get_shell("urn:aas:1").submodel_ids == (SM,)


def test_upsert_idempotent(repo):
    sm = repo.get_submodel(SM)
    before = Repository.open(repo.persistence_dir)
    repo.put_submodel(sm)
    assert Repository.open(repo.persistence_dir) == before


@pytest.mark.parametrize(
    "sm",
    [
        Submodel(SM, "x", (Property("a", DataType.REAL, 1.0), Property("a", DataType.REAL, 2.0))),
        Submodel(SM, "bad idShort"),
        Submodel("", "x"),
        Submodel(SM, "x", (Property("p", DataType.INTEGER, "1"),)),
        Submodel(SM, "x", (FileElement("f", "text/plain", ""),)),
        Submodel(SM, "x", (RelationshipElement("r", Reference(()), Reference(())),)),
    ],
)
def test_malformed_entities(repo, sm):
    with pytest.raises(MalformedEntity):
        repo.put_submodel(sm)


def test_get_element(repo):
    assert repo.get_element(SM, "temp").value == 22.5
    with pytest.raises(NotFound):
        repo.get_element(SM, "nope")
    with pytest.raises(NotFound):
        repo.get_element(SM, "temp.inner")
    with pytest.raises(NotFound):
        repo.get_element("urn:none", "temp")
    with pytest.raises(NotFound):
        repo.get_element(SM, "")


def test_set_property_value(repo):
    assert repo.set_property_value(SM, "temp", 45.0).value == 45.0
    assert repo.get_element(SM, "temp").value == 45.0
    assert Repository.open(repo.persistence_dir).get_element(SM, "temp").value == 45.0
    # integers widen for Real properties
    assert repo.set_property_value(SM, "temp", 3).value == 3.0
    with pytest.raises(NotAProperty):
        repo.set_property_value(SM, "file", 1.0)
    with pytest.raises(ValueTypeMismatch):
        repo.set_property_value(SM, "temp", "hot")
    with pytest.raises(ValueTypeMismatch):
        repo.set_property_value(SM, "temp", True)


def test_attachments(repo):
    data = fixture_bytes(TYPE_FIXTURE)
    repo.put_attachment(SM, "file", data)
    assert repo.get_attachment(SM, "file") == data
    assert Repository.open(repo.persistence_dir).get_attachment(SM, "file") == data
    assert repo.get_element(SM, "file").content_type == "application/xml"
    repo.put_attachment(SM, "file", b"", "text/plain")
    assert repo.get_attachment(SM, "file") == b""
    assert repo.get_element(SM, "file").content_type == "text/plain"
    with pytest.raises(NotAFile):
        repo.put_attachment(SM, "temp", b"x")
    with pytest.raises(NotAFile):
        repo.get_attachment(SM, "temp")


def test_stale_blobs_pruned(repo):
    for i in range(3):
        repo.put_attachment(SM, "file", bytes([i]) * 10)
    blobs = list((repo.persistence_dir / "blobs").rglob("*.bin"))
    assert len(blobs) == 1


def test_relationships(repo):
    first = Reference.to_element(SM, "file")
    rel = repo.add_relationship(SM, "link", first, Reference.to_model_attribute("DemoShopFloor", "currentTemperature"))
    assert repo.get_element(SM, "link") == rel
    assert rel.second.model_attribute_target() == ("DemoShopFloor", "currentTemperature")
    with pytest.raises(DuplicateIdShort):
        repo.add_relationship(SM, "link", first, first)
    with pytest.raises(NotFound):
        repo.add_relationship("urn:none", "x", first, first)
    with pytest.raises(MalformedEntity):
        repo.add_relationship(SM, "odd", first, Reference.to_model_attribute("", "x"))


def test_dangling_shell_reference_warns(repo):
    repo.put_shell(Shell("urn:aas:2", "AAS2", (SM, "urn:missing")))
    with pytest.warns(DanglingReferenceWarning):
        repo.get_shell("urn:aas:2")
    assert repo.dangling_references() == [("urn:aas:2", "urn:missing")]


def test_demo_seed_reload(seeded):
    assert Repository.open(seeded.persistence_dir) == seeded
    assert seeded.get_element(INFO_SUBMODEL_ID, TEMPERATURE_ID_SHORT).value == 22.5
    assert seeded.get_submodel(RESULT_SUBMODEL_ID).elements == ()


def test_empty_directory(tmp_path):
    assert Repository.open(tmp_path / "missing").shells() == []
    (tmp_path / "empty").mkdir()
    assert Repository.open(tmp_path / "empty").submodels() == []


def test_corrupt_documents(seeded):
    root = seeded.persistence_dir
    doc = next((root / "submodels").glob("*.json"))
    doc.write_bytes(doc.read_bytes()[:40])
    with pytest.raises(CorruptStore) as exc:
        Repository.open(root)
    assert exc.value.path == doc


def test_missing_and_truncated_blob(seeded):
    root = seeded.persistence_dir
    blob = next((root / "blobs").rglob("*.bin"))
    blob.write_bytes(blob.read_bytes()[:-1])
    with pytest.raises(CorruptStore):
        Repository.open(root)
    blob.unlink()
    with pytest.raises(CorruptStore):
        Repository.open(root)


def test_bad_structure(seeded):
    root = seeded.persistence_dir
    doc = next((root / "shells").glob("*.json"))
    doc.write_text(json.dumps({"modelType": "Submodel"}))
    with pytest.raises(CorruptStore) as exc:
        Repository.open(root)
    assert exc.value.path == doc


def test_unwritable_store(tmp_path):
    (tmp_path / "file").write_text("x")
    repo = Repository(tmp_path / "file" / "store")
    with pytest.raises(IoFailure):
        repo.put_shell(Shell("urn:a", "A"))
    # the failed write never became visible
    assert repo.shells() == []


@given(st.text(min_size=1))
def test_id_encoding_round_trip(identifier):
    encoded = encode_id(identifier)
    assert "/" not in encoded and "=" not in encoded
    assert decode_id(encoded) == identifier


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32))
def test_serialize_load_round_trip(tmp_path_factory, seed):
    repo = random_repository(random.Random(seed), max_attachment=4096)
    target = tmp_path_factory.mktemp("rt")
    serialize_repository(repo, target)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DanglingReferenceWarning)
        loaded = load_repository(target)
    assert loaded == repo
    # and again over the same directory: stale entities disappear
    other = random_repository(random.Random(seed + 1), max_attachment=64)
    serialize_repository(other, target)
    assert load_repository(target) == other


@settings(max_examples=30, deadline=None)
@given(st.lists(st.one_of(st.integers(-10, 10), st.floats(allow_nan=False), st.text(max_size=3), st.booleans()), max_size=10))
def test_property_type_safety(values):
    repo = Repository()
    repo.put_submodel(Submodel(SM, "S", (Property("p", DataType.REAL, 0.0),)))
    for value in values:
        try:
            repo.set_property_value(SM, "p", value)
        except ValueTypeMismatch:
            pass
        assert value_matches(DataType.REAL, repo.get_element(SM, "p").value)
        assert type(repo.get_element(SM, "p").value) is float


def test_readers_never_see_torn_state(tmp_path):
    repo = Repository(tmp_path / "s")
    a, b = b"a" * 50_000, b"b" * 50_000
    repo.put_submodel(Submodel(SM, "S", (FileElement("f", "x", "f.bin", a), FileElement("g", "x", "g.bin", a))))
    stop = threading.Event()
    seen = []

    def writer():
        for i in range(40):
            data = a if i % 2 else b
            repo.put_elements(SM, [FileElement("f", "x", "f.bin", data), FileElement("g", "x", "g.bin", data)])
        stop.set()

    def reader():
        while not stop.is_set():
            sm = repo.get_submodel(SM)
            seen.append(sm.element("f").attachment == sm.element("g").attachment)

    threads = [threading.Thread(target=writer)] + [threading.Thread(target=reader) for _ in range(3)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert seen and all(seen)
