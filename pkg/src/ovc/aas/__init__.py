"""Asset Administration Shell subset: shells, submodels, three element kinds."""

from .model import (
    AasError,
    DuplicateIdShort,
    FileElement,
    Key,
    KeyType,
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
)
from .repository import DanglingReferenceWarning, Repository
from .store import CorruptStore, IoFailure, load_repository, serialize_repository

__all__ = [
    "AasError",
    "CorruptStore",
    "DanglingReferenceWarning",
    "DuplicateIdShort",
    "FileElement",
    "IoFailure",
    "Key",
    "KeyType",
    "MalformedEntity",
    "NotAFile",
    "NotAProperty",
    "NotFound",
    "Property",
    "Reference",
    "RelationshipElement",
    "Repository",
    "Shell",
    "Submodel",
    "SubmodelElement",
    "ValueTypeMismatch",
    "load_repository",
    "serialize_repository",
]
