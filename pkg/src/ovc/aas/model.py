"""Shells, submodels and the Property/File/Relationship element subset.

The same JSON documents are used on disk and on the wire; only File
attachments travel separately (blob files, or the ``/attachment`` endpoint).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Any, Union

from ..errors import OvcError
from ..model import DataType, Scalar, value_matches

ID_SHORT_RE = re.compile(r"^[A-Za-z0-9_]+$")


class AasError(OvcError):
    pass


class NotFound(AasError):
    pass


class MalformedEntity(AasError):
    pass


class NotAProperty(AasError):
    pass


class NotAFile(AasError):
    pass


class ValueTypeMismatch(AasError):
    pass


class DuplicateIdShort(AasError):
    pass


class KeyType(str, Enum):
    SUBMODEL = "Submodel"
    SUBMODEL_ELEMENT = "SubmodelElement"
    MODEL_OBJECT_ATTRIBUTE = "ModelObjectAttribute"


@dataclass(frozen=True)
class Key:
    type: KeyType
    value: str


@dataclass(frozen=True)
class Reference:
    keys: tuple[Key, ...]

    @classmethod
    def to_element(cls, submodel_id: str, id_short_path: str) -> Reference:
        return cls((Key(KeyType.SUBMODEL, submodel_id), Key(KeyType.SUBMODEL_ELEMENT, id_short_path)))

    @classmethod
    def to_model_attribute(cls, object_id: str, attribute: str) -> Reference:
        return cls((Key(KeyType.MODEL_OBJECT_ATTRIBUTE, f"{object_id}#{attribute}"),))

    def element_target(self) -> tuple[str, str] | None:
        """(submodel id, idShort path) if this points at a submodel element."""
        if len(self.keys) == 2 and self.keys[0].type is KeyType.SUBMODEL and self.keys[1].type is KeyType.SUBMODEL_ELEMENT:
            return self.keys[0].value, self.keys[1].value
        return None

    def model_attribute_target(self) -> tuple[str, str] | None:
        """(object id, attribute name) if this points into an instance model."""
        if len(self.keys) == 1 and self.keys[0].type is KeyType.MODEL_OBJECT_ATTRIBUTE:
            object_id, sep, attribute = self.keys[0].value.rpartition("#")
            if sep and object_id and attribute:
                return object_id, attribute
        return None


@dataclass(frozen=True)
class Property:
    id_short: str
    value_type: DataType
    value: Scalar | None = None
    semantic_id: str | None = None


@dataclass(frozen=True)
class FileElement:
    id_short: str
    content_type: str
    file_name: str
    attachment: bytes = b""
    semantic_id: str | None = None


@dataclass(frozen=True)
class RelationshipElement:
    id_short: str
    first: Reference
    second: Reference
    semantic_id: str | None = None


SubmodelElement = Union[Property, FileElement, RelationshipElement]


@dataclass(frozen=True)
class Submodel:
    id: str
    id_short: str
    elements: tuple[SubmodelElement, ...] = ()
    semantic_id: str | None = None

    def element(self, id_short: str) -> SubmodelElement | None:
        for element in self.elements:
            if element.id_short == id_short:
                return element
        return None


@dataclass(frozen=True)
class Shell:
    id: str
    id_short: str
    submodel_ids: tuple[str, ...] = ()


# -- validation ------------------------------------------------------------


def check_id_short(id_short: str) -> None:
    if not isinstance(id_short, str) or not ID_SHORT_RE.match(id_short):
        raise MalformedEntity(f"invalid idShort {id_short!r}: only [A-Za-z0-9_] allowed")


def _check_reference(ref: Reference, where: str) -> None:
    if not isinstance(ref, Reference) or not ref.keys:
        raise MalformedEntity(f"{where}: reference needs at least one key")
    for key in ref.keys:
        if not isinstance(key.type, KeyType) or not isinstance(key.value, str) or not key.value:
            raise MalformedEntity(f"{where}: malformed key {key!r}")
    if ref.keys[0].type is KeyType.MODEL_OBJECT_ATTRIBUTE and ref.model_attribute_target() is None:
        raise MalformedEntity(f"{where}: ModelObjectAttribute key must look like '<objectId>#<attribute>'")


def validate_element(element: SubmodelElement) -> None:
    check_id_short(element.id_short)
    if isinstance(element, Property):
        if not isinstance(element.value_type, DataType):
            raise MalformedEntity(f"{element.id_short}: unknown valueType {element.value_type!r}")
        if element.value is not None and not value_matches(element.value_type, element.value):
            raise MalformedEntity(f"{element.id_short}: value {element.value!r} is not a {element.value_type.value}")
    elif isinstance(element, FileElement):
        if not element.file_name:
            raise MalformedEntity(f"{element.id_short}: File element needs a fileName")
        if not isinstance(element.attachment, bytes):
            raise MalformedEntity(f"{element.id_short}: attachment must be bytes")
    elif isinstance(element, RelationshipElement):
        _check_reference(element.first, f"{element.id_short}.first")
        _check_reference(element.second, f"{element.id_short}.second")
    else:
        raise MalformedEntity(f"unsupported submodel element {element!r}")


def validate_submodel(sm: Submodel) -> None:
    if not sm.id:
        raise MalformedEntity("submodel id must not be empty")
    check_id_short(sm.id_short)
    seen = set()
    for element in sm.elements:
        validate_element(element)
        if element.id_short in seen:
            raise MalformedEntity(f"idShort {element.id_short!r} used twice in submodel {sm.id!r}")
        seen.add(element.id_short)


def validate_shell(shell: Shell) -> None:
    if not shell.id:
        raise MalformedEntity("shell id must not be empty")
    check_id_short(shell.id_short)
    if any(not sid for sid in shell.submodel_ids):
        raise MalformedEntity(f"shell {shell.id!r} lists an empty submodel id")


# -- documents -------------------------------------------------------------


def reference_to_dict(ref: Reference) -> dict[str, Any]:
    return {"keys": [{"type": key.type.value, "value": key.value} for key in ref.keys]}


def reference_from_dict(doc: Any) -> Reference:
    return Reference(tuple(Key(KeyType(k["type"]), k["value"]) for k in doc["keys"]))


def element_to_dict(element: SubmodelElement) -> dict[str, Any]:
    """Document for ``element``; File attachments are described, not embedded."""
    if isinstance(element, Property):
        doc: dict[str, Any] = {
            "modelType": "Property",
            "idShort": element.id_short,
            "valueType": element.value_type.value,
            "value": element.value,
        }
    elif isinstance(element, FileElement):
        doc = {
            "modelType": "File",
            "idShort": element.id_short,
            "contentType": element.content_type,
            "fileName": element.file_name,
            "size": len(element.attachment),
        }
    else:
        doc = {
            "modelType": "RelationshipElement",
            "idShort": element.id_short,
            "first": reference_to_dict(element.first),
            "second": reference_to_dict(element.second),
        }
    if element.semantic_id is not None:
        doc["semanticId"] = element.semantic_id
    return doc


def element_from_dict(doc: Any, attachment: bytes = b"") -> SubmodelElement:
    """Inverse of :func:`element_to_dict`; raises MalformedEntity."""
    try:
        kind = doc["modelType"]
        semantic_id = doc.get("semanticId")
        if kind == "Property":
            value_type = DataType(doc["valueType"])
            value = doc.get("value")
            if value_type is DataType.REAL and type(value) is int:
                value = float(value)
            element: SubmodelElement = Property(doc["idShort"], value_type, value, semantic_id)
        elif kind == "File":
            element = FileElement(doc["idShort"], doc["contentType"], doc["fileName"], attachment, semantic_id)
        elif kind == "RelationshipElement":
            element = RelationshipElement(
                doc["idShort"], reference_from_dict(doc["first"]), reference_from_dict(doc["second"]), semantic_id
            )
        else:
            raise MalformedEntity(f"unsupported modelType {kind!r}")
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedEntity(f"malformed submodel element document: {exc!r}") from exc
    validate_element(element)
    return element


def submodel_to_dict(sm: Submodel) -> dict[str, Any]:
    doc: dict[str, Any] = {"modelType": "Submodel", "id": sm.id, "idShort": sm.id_short}
    if sm.semantic_id is not None:
        doc["semanticId"] = sm.semantic_id
    doc["submodelElements"] = [element_to_dict(e) for e in sm.elements]
    return doc


def shell_to_dict(shell: Shell) -> dict[str, Any]:
    return {
        "modelType": "AssetAdministrationShell",
        "id": shell.id,
        "idShort": shell.id_short,
        "submodels": [reference_to_dict(Reference((Key(KeyType.SUBMODEL, sid),))) for sid in shell.submodel_ids],
    }


def shell_from_dict(doc: Any) -> Shell:
    try:
        if doc["modelType"] != "AssetAdministrationShell":
            raise MalformedEntity(f"expected an AssetAdministrationShell, got {doc['modelType']!r}")
        submodel_ids = tuple(reference_from_dict(r).keys[0].value for r in doc["submodels"])
        shell = Shell(doc["id"], doc["idShort"], submodel_ids)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise MalformedEntity(f"malformed shell document: {exc!r}") from exc
    validate_shell(shell)
    return shell
