"""Thread-safe repository of shells and submodels.

Writers serialize on a reentrant lock and publish new dictionaries only
after the entity is on disk; readers take whatever dictionary is current, so
they see either the state before or after a write.
"""

from __future__ import annotations

import dataclasses
import threading
import warnings
from pathlib import Path
from typing import Iterable

from ..model import Scalar, coerce_value, value_matches
from . import store
from .model import (
    DuplicateIdShort,
    FileElement,
    MalformedEntity,
    NotAFile,
    NotAProperty,
    NotFound,
    Property,
    Reference,
    RelationshipElement,
    Shell,
    Submodel,
    SubmodelElement,
    ValueTypeMismatch,
    check_id_short,
    validate_element,
    validate_shell,
    validate_submodel,
)


class DanglingReferenceWarning(UserWarning):
    pass


class Repository:
    def __init__(self, persistence_dir: Path | str | None = None) -> None:
        self.persistence_dir = Path(persistence_dir) if persistence_dir is not None else None
        self._shells: dict[str, Shell] = {}
        self._submodels: dict[str, Submodel] = {}
        self._lock = threading.RLock()

    @classmethod
    def _from_state(cls, root: Path, shells: dict[str, Shell], submodels: dict[str, Submodel]) -> Repository:
        repo = cls(root)
        repo._shells = shells
        repo._submodels = submodels
        return repo

    @classmethod
    def open(cls, persistence_dir: Path | str) -> Repository:
        return store.load_repository(persistence_dir)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Repository):
            return NotImplemented
        return self._shells == other._shells and self._submodels == other._submodels

    def __repr__(self) -> str:
        return f"Repository({self.persistence_dir}, {len(self._shells)} shells, {len(self._submodels)} submodels)"

    def writer(self) -> threading.RLock:
        """Hold this to make a sequence of operations exclusive."""
        return self._lock

    # -- reads ------------------------------------------------------------

    def shells(self) -> list[Shell]:
        return list(self._shells.values())

    def submodels(self) -> list[Submodel]:
        return list(self._submodels.values())

    def get_shell(self, shell_id: str) -> Shell:
        shell = self._shells.get(shell_id)
        if shell is None:
            raise NotFound(f"no shell {shell_id!r}")
        submodels = self._submodels
        for sid in shell.submodel_ids:
            if sid not in submodels:
                warnings.warn(f"shell {shell_id!r} references missing submodel {sid!r}", DanglingReferenceWarning, stacklevel=2)
        return shell

    def get_submodel(self, submodel_id: str) -> Submodel:
        sm = self._submodels.get(submodel_id)
        if sm is None:
            raise NotFound(f"no submodel {submodel_id!r}")
        return sm

    def dangling_references(self) -> list[tuple[str, str]]:
        submodels = self._submodels
        return [(s.id, sid) for s in self._shells.values() for sid in s.submodel_ids if sid not in submodels]

    def get_element(self, submodel_id: str, id_short_path: str) -> SubmodelElement:
        return _resolve(self.get_submodel(submodel_id), id_short_path)

    def get_attachment(self, submodel_id: str, id_short_path: str) -> bytes:
        element = self.get_element(submodel_id, id_short_path)
        if not isinstance(element, FileElement):
            raise NotAFile(f"{id_short_path!r} in {submodel_id!r} is a {type(element).__name__}, not a File")
        return element.attachment

    # -- writes -----------------------------------------------------------

    def put_shell(self, shell: Shell) -> str:
        validate_shell(shell)
        with self._lock:
            if self.persistence_dir is not None:
                store.write_shell(self.persistence_dir, shell)
            self._shells = {**self._shells, shell.id: shell}
        return shell.id

    def put_submodel(self, sm: Submodel) -> str:
        validate_submodel(sm)
        with self._lock:
            if self.persistence_dir is not None:
                store.write_submodel(self.persistence_dir, sm)
            self._submodels = {**self._submodels, sm.id: sm}
        return sm.id

    def _replace_element(self, submodel_id: str, id_short_path: str, new: SubmodelElement) -> None:
        sm = self.get_submodel(submodel_id)
        elements = tuple(new if e.id_short == id_short_path else e for e in sm.elements)
        self.put_submodel(dataclasses.replace(sm, elements=elements))

    def set_property_value(self, submodel_id: str, id_short_path: str, value: Scalar) -> Property:
        with self._lock:
            element = self.get_element(submodel_id, id_short_path)
            if not isinstance(element, Property):
                raise NotAProperty(f"{id_short_path!r} in {submodel_id!r} is a {type(element).__name__}, not a Property")
            if not value_matches(element.value_type, value):
                raise ValueTypeMismatch(
                    f"{id_short_path!r} holds {element.value_type.value} values, got {type(value).__name__} {value!r}"
                )
            updated = dataclasses.replace(element, value=coerce_value(element.value_type, value))
            self._replace_element(submodel_id, id_short_path, updated)
        return updated

    def put_attachment(
        self, submodel_id: str, id_short_path: str, data: bytes, content_type: str | None = None
    ) -> FileElement:
        with self._lock:
            element = self.get_element(submodel_id, id_short_path)
            if not isinstance(element, FileElement):
                raise NotAFile(f"{id_short_path!r} in {submodel_id!r} is a {type(element).__name__}, not a File")
            updated = dataclasses.replace(
                element, attachment=bytes(data), content_type=content_type or element.content_type
            )
            self._replace_element(submodel_id, id_short_path, updated)
        return updated

    def add_relationship(
        self, submodel_id: str, id_short: str, first: Reference, second: Reference
    ) -> RelationshipElement:
        element = RelationshipElement(id_short, first, second)
        validate_element(element)
        with self._lock:
            sm = self.get_submodel(submodel_id)
            if sm.element(id_short) is not None:
                raise DuplicateIdShort(f"idShort {id_short!r} already used in {submodel_id!r}")
            self.put_submodel(dataclasses.replace(sm, elements=sm.elements + (element,)))
        return element

    def put_elements(self, submodel_id: str, elements: Iterable[SubmodelElement]) -> None:
        """Upsert several elements by idShort in one persisted write."""
        with self._lock:
            sm = self.get_submodel(submodel_id)
            current = list(sm.elements)
            for element in elements:
                positions = [i for i, e in enumerate(current) if e.id_short == element.id_short]
                if positions:
                    current[positions[0]] = element
                else:
                    current.append(element)
            self.put_submodel(dataclasses.replace(sm, elements=tuple(current)))

    def flush(self) -> None:
        """Rewrite the whole store from memory (no-op when not persisted)."""
        with self._lock:
            if self.persistence_dir is not None:
                store.serialize_repository(self, self.persistence_dir)


def _resolve(sm: Submodel, id_short_path: str) -> SubmodelElement:
    segments = id_short_path.split(".")
    for segment in segments:
        try:
            check_id_short(segment)
        except MalformedEntity:
            raise NotFound(f"invalid idShort path {id_short_path!r}") from None
    # Only flat submodels exist in this subset: anything deeper is absent.
    if len(segments) != 1:
        raise NotFound(f"no element {id_short_path!r} in {sm.id!r}")
    element = sm.element(segments[0])
    if element is None:
        raise NotFound(f"no element {id_short_path!r} in {sm.id!r}")
    return element
