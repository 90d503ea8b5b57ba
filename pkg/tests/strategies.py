"""Random repository states shared by unit and acceptance tests."""

from __future__ import annotations

import random

from ovc.aas import FileElement, Property, Reference, RelationshipElement, Repository, Shell, Submodel
from ovc.model import DataType

_ALNUM = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_"


def _id_short(rng: random.Random) -> str:
    return "".join(rng.choice(_ALNUM) for _ in range(rng.randint(1, 12)))


def _iri(rng: random.Random, kind: str) -> str:
    # ids are free text; include characters that are unsafe in file names
    tail = "".join(rng.choice(_ALNUM + "/:?#&é ") for _ in range(rng.randint(1, 16)))
    return f"https://example.com/{kind}/{tail}"


def _value(rng: random.Random, dtype: DataType):
    if dtype is DataType.STRING:
        return "".join(rng.choice(_ALNUM + " äö\n'\"") for _ in range(rng.randint(0, 10)))
    if dtype is DataType.INTEGER:
        return rng.randint(-(2**40), 2**40)
    if dtype is DataType.REAL:
        return rng.choice([0.0, -0.5, 1e300, rng.uniform(-1e6, 1e6)])
    return rng.random() < 0.5


def _reference(rng: random.Random) -> Reference:
    if rng.random() < 0.3:
        return Reference.to_model_attribute(f"Obj/{_id_short(rng)}", _id_short(rng))
    return Reference.to_element(_iri(rng, "sm"), _id_short(rng))


def random_element(rng: random.Random, id_short: str, max_attachment: int):
    kind = rng.randrange(3)
    semantic_id = _iri(rng, "sem") if rng.random() < 0.2 else None
    if kind == 0:
        dtype = rng.choice(list(DataType))
        value = None if rng.random() < 0.1 else _value(rng, dtype)
        return Property(id_short, dtype, value, semantic_id)
    if kind == 1:
        size = rng.choice([0, 1, rng.randint(0, max_attachment)])
        data = rng.randbytes(size)
        return FileElement(id_short, rng.choice(["application/octet-stream", "text/plain", ""]), f"{id_short}.bin", data, semantic_id)
    return RelationshipElement(id_short, _reference(rng), _reference(rng), semantic_id)


def random_repository(rng: random.Random, max_attachment: int = 64 * 1024, persistence_dir=None) -> Repository:
    repo = Repository(persistence_dir)
    submodel_ids = []
    for _ in range(rng.randint(0, 4)):
        names = list(dict.fromkeys(_id_short(rng) for _ in range(rng.randint(0, 5))))
        sm = Submodel(_iri(rng, "sm"), _id_short(rng), tuple(random_element(rng, n, max_attachment) for n in names))
        repo.put_submodel(sm)
        submodel_ids.append(sm.id)
    for _ in range(rng.randint(0, 3)):
        chosen = rng.sample(submodel_ids, rng.randint(0, len(submodel_ids)))
        repo.put_shell(Shell(_iri(rng, "aas"), _id_short(rng), tuple(chosen)))
    return repo
