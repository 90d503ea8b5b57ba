"""Type models (metaclasses) and instance models (objects with slots).

Both levels are immutable values. :func:`set_slot` is the only way to change
an instance model and it returns a new one, leaving the original untouched.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping, Union

from .errors import OvcError

Scalar = Union[bool, int, float, str]


class DataType(str, Enum):
    STRING = "String"
    INTEGER = "Integer"
    REAL = "Real"
    BOOLEAN = "Boolean"


def value_matches(datatype: DataType, value: object) -> bool:
    """True if ``value`` is acceptable for ``datatype``.

    Integers are accepted for Real (widening); booleans are never numbers.
    """
    kind = type(value)
    if datatype is DataType.STRING:
        return kind is str
    if datatype is DataType.INTEGER:
        return kind is int
    if datatype is DataType.REAL:
        return kind is float or kind is int
    return kind is bool


def coerce_value(datatype: DataType, value: Scalar) -> Scalar:
    if datatype is DataType.REAL and type(value) is int:
        return float(value)
    return value


def parse_scalar(datatype: DataType, text: str) -> Scalar:
    """Parse ``text`` as a literal of ``datatype``; raises ValueError."""
    text = text.strip()
    if datatype is DataType.STRING:
        return text
    if datatype is DataType.INTEGER:
        return int(text)
    if datatype is DataType.REAL:
        return float(text)
    lowered = text.lower()
    if lowered in ("true", "1"):
        return True
    if lowered in ("false", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def format_scalar(value: Scalar) -> str:
    if type(value) is bool:
        return "true" if value else "false"
    if type(value) is float:
        return repr(value)
    return str(value)


class ModelError(OvcError):
    pass


class UnknownClass(ModelError):
    pass


class UnknownObject(ModelError):
    pass


class UnknownAttribute(ModelError):
    pass


class TypeMismatch(ModelError):
    pass


class ExportRejected(ModelError):
    def __init__(self, errors: list[ConformanceError]) -> None:
        self.errors = errors
        detail = "; ".join(str(e) for e in errors)
        super().__init__(f"model does not conform ({len(errors)} error(s)): {detail}")


@dataclass(frozen=True)
class MetaAttribute:
    name: str
    datatype: DataType


@dataclass(frozen=True)
class MetaReference:
    name: str
    target_class: str
    containment: bool = False
    upper_bound: int | None = None  # None means unbounded

    def __post_init__(self) -> None:
        if self.upper_bound is not None and self.upper_bound < 1:
            raise ValueError(f"upper bound of {self.name!r} must be >= 1 or unbounded")

    @property
    def many(self) -> bool:
        return self.upper_bound is None or self.upper_bound > 1


@dataclass(frozen=True)
class MetaClass:
    name: str
    attributes: tuple[MetaAttribute, ...] = ()
    references: tuple[MetaReference, ...] = ()

    def __post_init__(self) -> None:
        attr_names = [a.name for a in self.attributes]
        ref_names = [r.name for r in self.references]
        if len(set(attr_names)) != len(attr_names):
            raise ValueError(f"duplicate attribute name in class {self.name!r}")
        if len(set(ref_names)) != len(ref_names):
            raise ValueError(f"duplicate reference name in class {self.name!r}")
        clash = set(attr_names) & set(ref_names)
        if clash:
            raise ValueError(f"{sorted(clash)} used as both attribute and reference in {self.name!r}")

    def attribute(self, name: str) -> MetaAttribute | None:
        for attr in self.attributes:
            if attr.name == name:
                return attr
        return None

    def reference(self, name: str) -> MetaReference | None:
        for ref in self.references:
            if ref.name == name:
                return ref
        return None


@dataclass(frozen=True)
class TypeModel:
    name: str
    classes: tuple[MetaClass, ...] = ()

    def __post_init__(self) -> None:
        names = [c.name for c in self.classes]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate class name in type model {self.name!r}")
        for cls in self.classes:
            for ref in cls.references:
                if ref.target_class not in names:
                    raise ValueError(
                        f"reference {cls.name}.{ref.name} targets unknown class {ref.target_class!r}"
                    )

    def get_class(self, name: str) -> MetaClass | None:
        for cls in self.classes:
            if cls.name == name:
                return cls
        return None


@dataclass(frozen=True)
class ModelObject:
    id: str
    class_name: str
    slots: Mapping[str, Scalar] = field(default_factory=dict)
    links: Mapping[str, tuple[str, ...]] = field(default_factory=dict)


@dataclass(frozen=True)
class InstanceModel:
    name: str
    conforms_to: TypeModel
    objects: tuple[ModelObject, ...] = ()

    @cached_property
    def _index(self) -> dict[str, ModelObject]:
        return {obj.id: obj for obj in self.objects}

    def get(self, object_id: str) -> ModelObject | None:
        return self._index.get(object_id)


@dataclass(frozen=True)
class ConformanceError:
    object_id: str
    kind: str
    detail: str

    def __str__(self) -> str:
        return f"{self.object_id}: {self.kind}: {self.detail}"


def check_conformance(instance: InstanceModel) -> list[ConformanceError]:
    """Report every structural violation of ``instance`` against its type model.

    Kinds: DuplicateId, UnknownClass, UnknownAttribute, TypeMismatch,
    UnknownReference, DanglingLink, WrongTargetClass, UpperBoundExceeded,
    MultipleContainers, ContainmentCycle.
    """
    tm = instance.conforms_to
    errors: list[ConformanceError] = []
    ids = [obj.id for obj in instance.objects]
    seen: set[str] = set()
    for oid in ids:
        if oid in seen:
            errors.append(ConformanceError(oid, "DuplicateId", "object id used more than once"))
        seen.add(oid)

    containers: dict[str, list[str]] = {}
    for obj in instance.objects:
        cls = tm.get_class(obj.class_name)
        if cls is None:
            errors.append(ConformanceError(obj.id, "UnknownClass", f"class {obj.class_name!r} not in {tm.name!r}"))
            continue
        for name, value in obj.slots.items():
            attr = cls.attribute(name)
            if attr is None:
                errors.append(ConformanceError(obj.id, "UnknownAttribute", f"{cls.name} has no attribute {name!r}"))
            elif not value_matches(attr.datatype, value):
                errors.append(
                    ConformanceError(
                        obj.id,
                        "TypeMismatch",
                        f"{name} = {value!r} is not a {attr.datatype.value}",
                    )
                )
        for name, targets in obj.links.items():
            ref = cls.reference(name)
            if ref is None:
                errors.append(ConformanceError(obj.id, "UnknownReference", f"{cls.name} has no reference {name!r}"))
                continue
            if ref.upper_bound is not None and len(targets) > ref.upper_bound:
                errors.append(
                    ConformanceError(
                        obj.id,
                        "UpperBoundExceeded",
                        f"{name} holds {len(targets)} targets, upper bound is {ref.upper_bound}",
                    )
                )
            for target_id in targets:
                target = instance.get(target_id)
                if target is None:
                    errors.append(ConformanceError(obj.id, "DanglingLink", f"{name} -> {target_id!r} does not resolve"))
                elif target.class_name != ref.target_class:
                    errors.append(
                        ConformanceError(
                            obj.id,
                            "WrongTargetClass",
                            f"{name} -> {target_id!r} is a {target.class_name}, expected {ref.target_class}",
                        )
                    )
                elif ref.containment:
                    containers.setdefault(target_id, []).append(obj.id)

    for child, parents in containers.items():
        if len(parents) > 1:
            errors.append(
                ConformanceError(child, "MultipleContainers", f"contained by {', '.join(parents)}")
            )
    for oid in _containment_cycle_members(containers):
        errors.append(ConformanceError(oid, "ContainmentCycle", "object is (transitively) contained in itself"))
    return errors


def _containment_cycle_members(containers: Mapping[str, list[str]]) -> list[str]:
    members = []
    for start in containers:
        current, visited = start, set()
        while current in containers and current not in visited:
            visited.add(current)
            current = containers[current][0]
        if current == start:
            members.append(start)
    return members


def all_instances_of(instance: InstanceModel, class_name: str) -> list[ModelObject]:
    if instance.conforms_to.get_class(class_name) is None:
        raise UnknownClass(f"class {class_name!r} not in type model {instance.conforms_to.name!r}")
    return [obj for obj in instance.objects if obj.class_name == class_name]


def set_slot(instance: InstanceModel, object_id: str, attr_name: str, value: Scalar) -> InstanceModel:
    """Return a copy of ``instance`` with one slot replaced."""
    obj = instance.get(object_id)
    if obj is None:
        raise UnknownObject(f"no object {object_id!r} in {instance.name!r}")
    cls = instance.conforms_to.get_class(obj.class_name)
    attr = cls.attribute(attr_name) if cls is not None else None
    if attr is None:
        raise UnknownAttribute(f"{obj.class_name} has no attribute {attr_name!r}")
    if not value_matches(attr.datatype, value):
        raise TypeMismatch(f"{object_id}.{attr_name}: {value!r} is not a {attr.datatype.value}")
    updated = dataclasses.replace(obj, slots={**obj.slots, attr_name: coerce_value(attr.datatype, value)})
    objects = tuple(updated if o.id == object_id else o for o in instance.objects)
    return dataclasses.replace(instance, objects=objects)


def root_objects(instance: InstanceModel) -> list[ModelObject]:
    """Objects not contained by any other object, in declaration order."""
    contained = set(_contained_ids(instance))
    return [obj for obj in instance.objects if obj.id not in contained]


def _contained_ids(instance: InstanceModel) -> Iterable[str]:
    for obj in instance.objects:
        cls = instance.conforms_to.get_class(obj.class_name)
        if cls is None:
            continue
        for ref in cls.references:
            if ref.containment:
                yield from obj.links.get(ref.name, ())
