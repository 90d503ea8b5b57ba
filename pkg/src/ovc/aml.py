"""AutomationML (CAEX 3.0) ingestion into type and instance models.

Only the structural backbone is read: SystemUnitClassLib/SystemUnitClass
define classes, InstanceHierarchy/InternalElement define objects.  Role and
interface libraries are skipped; class resolution goes through
``RefBaseSystemUnitPath`` alone.
"""

from __future__ import annotations

import logging
import warnings
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .errors import OvcError
from .model import (
    DataType,
    InstanceModel,
    MetaAttribute,
    MetaClass,
    MetaReference,
    ModelObject,
    TypeModel,
    parse_scalar,
)

log = logging.getLogger(__name__)

DATATYPE_HINTS = {
    "xs:string": DataType.STRING,
    "xs:int": DataType.INTEGER,
    "xs:integer": DataType.INTEGER,
    "xs:long": DataType.INTEGER,
    "xs:short": DataType.INTEGER,
    "xs:double": DataType.REAL,
    "xs:float": DataType.REAL,
    "xs:decimal": DataType.REAL,
    "xs:boolean": DataType.BOOLEAN,
}

# Header elements that carry no model content; skipped without a warning.
_QUIET = {
    "SuperiorStandardVersion",
    "SourceDocumentInformation",
    "AdditionalInformation",
    "Description",
    "Version",
    "Revision",
    "Copyright",
}


class CaexError(OvcError):
    pass


class XmlMalformed(CaexError):
    pass


class MissingName(CaexError):
    pass


class DuplicateName(CaexError):
    pass


class NoTypeContent(CaexError):
    pass


class DuplicateClassName(CaexError):
    pass


class UnresolvedClassPath(CaexError):
    pass


class ValueParseError(CaexError):
    def __init__(self, element: str, attribute: str, text: str, datatype: DataType) -> None:
        self.element = element
        self.attribute = attribute
        self.text = text
        super().__init__(f"{element}: attribute {attribute!r} value {text!r} is not a valid {datatype.value}")


class CaexWarning(UserWarning):
    pass


@dataclass(frozen=True)
class CaexAttribute:
    name: str
    data_type: str | None = None
    value: str | None = None


@dataclass(frozen=True)
class CaexElement:
    name: str
    ref_base_system_unit_path: str = ""
    attributes: tuple[CaexAttribute, ...] = ()
    children: tuple[CaexElement, ...] = ()


@dataclass(frozen=True)
class CaexClassDef:
    name: str
    attributes: tuple[CaexAttribute, ...] = ()
    children: tuple[CaexElement, ...] = ()  # typed child declarations
    nested: tuple[CaexClassDef, ...] = ()


@dataclass(frozen=True)
class CaexLibrary:
    name: str
    classes: tuple[CaexClassDef, ...] = ()


@dataclass(frozen=True)
class CaexHierarchy:
    name: str
    elements: tuple[CaexElement, ...] = ()


@dataclass(frozen=True)
class CaexDocument:
    file_name: str
    system_unit_class_libs: tuple[CaexLibrary, ...] = ()
    instance_hierarchies: tuple[CaexHierarchy, ...] = ()
    warnings: tuple[str, ...] = field(default=(), compare=False)


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


class _Reader:
    def __init__(self) -> None:
        self.warnings: list[str] = []

    def skip(self, node: ET.Element, where: str) -> None:
        tag = _local(node.tag)
        if tag not in _QUIET:
            self.warnings.append(f"ignored <{tag}> in {where}")

    def name_of(self, node: ET.Element, where: str) -> str:
        name = (node.get("Name") or "").strip()
        if not name:
            raise MissingName(f"<{_local(node.tag)}> without Name in {where}")
        return name

    def attribute(self, node: ET.Element, where: str) -> CaexAttribute:
        name = self.name_of(node, where)
        value = None
        for child in node:
            tag = _local(child.tag)
            if tag == "Value":
                value = child.text or ""
            elif tag != "DefaultValue":
                self.skip(child, f"{where}/{name}")
        return CaexAttribute(name, node.get("AttributeDataType"), value)

    def element(self, node: ET.Element, where: str) -> CaexElement:
        name = self.name_of(node, where)
        path = f"{where}/{name}"
        attributes, children = [], []
        for child in node:
            tag = _local(child.tag)
            if tag == "Attribute":
                attributes.append(self.attribute(child, path))
            elif tag == "InternalElement":
                children.append(self.element(child, path))
            else:
                self.skip(child, path)
        _check_unique([a.name for a in attributes], f"attribute in {path}")
        _check_unique([c.name for c in children], f"child element in {path}")
        return CaexElement(name, (node.get("RefBaseSystemUnitPath") or "").strip(), tuple(attributes), tuple(children))

    def class_def(self, node: ET.Element, where: str) -> CaexClassDef:
        name = self.name_of(node, where)
        path = f"{where}/{name}"
        attributes, children, nested = [], [], []
        for child in node:
            tag = _local(child.tag)
            if tag == "Attribute":
                attributes.append(self.attribute(child, path))
            elif tag == "InternalElement":
                children.append(self.element(child, path))
            elif tag == "SystemUnitClass":
                nested.append(self.class_def(child, path))
            else:
                self.skip(child, path)
        _check_unique([a.name for a in attributes], f"attribute in {path}")
        _check_unique([c.name for c in children], f"child element in {path}")
        return CaexClassDef(name, tuple(attributes), tuple(children), tuple(nested))


def _check_unique(names: list[str], what: str) -> None:
    seen = set()
    for name in names:
        if name in seen:
            raise DuplicateName(f"duplicate {what}: {name!r}")
        seen.add(name)


def parse_caex(data: bytes, file_name: str = "") -> CaexDocument:
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise XmlMalformed(f"{file_name or 'document'} is not well-formed XML: {exc}") from exc
    if _local(root.tag) != "CAEXFile":
        raise XmlMalformed(f"root element is <{_local(root.tag)}>, expected <CAEXFile>")
    file_name = file_name or root.get("FileName", "")
    reader = _Reader()
    libs, hierarchies = [], []
    for node in root:
        tag = _local(node.tag)
        if tag == "SystemUnitClassLib":
            lib_name = reader.name_of(node, "CAEXFile")
            classes = []
            for child in node:
                if _local(child.tag) == "SystemUnitClass":
                    classes.append(reader.class_def(child, lib_name))
                else:
                    reader.skip(child, lib_name)
            libs.append(CaexLibrary(lib_name, tuple(classes)))
        elif tag == "InstanceHierarchy":
            ih_name = reader.name_of(node, "CAEXFile")
            elements = []
            for child in node:
                if _local(child.tag) == "InternalElement":
                    elements.append(reader.element(child, ih_name))
                else:
                    reader.skip(child, ih_name)
            _check_unique([e.name for e in elements], f"element in {ih_name}")
            hierarchies.append(CaexHierarchy(ih_name, tuple(elements)))
        else:
            reader.skip(node, "CAEXFile")
    for message in reader.warnings:
        log.debug("%s: %s", file_name, message)
    return CaexDocument(file_name, tuple(libs), tuple(hierarchies), tuple(reader.warnings))


def _datatype(attr: CaexAttribute, where: str) -> DataType:
    if attr.data_type is None or not attr.data_type.strip():
        warnings.warn(f"{where}.{attr.name}: no AttributeDataType, using String", CaexWarning, stacklevel=3)
        return DataType.STRING
    hint = attr.data_type.strip()
    if hint not in DATATYPE_HINTS:
        warnings.warn(f"{where}.{attr.name}: unsupported type {hint!r}, using String", CaexWarning, stacklevel=3)
        return DataType.STRING
    return DATATYPE_HINTS[hint]


def _class_name(path: str) -> str:
    return path.rstrip("/").rsplit("/", 1)[-1]


def _flatten_classes(classes: tuple[CaexClassDef, ...]) -> list[CaexClassDef]:
    out = []
    for cdef in classes:
        out.append(cdef)
        out.extend(_flatten_classes(cdef.nested))
    return out


def caex_to_typemodel(doc: CaexDocument) -> TypeModel:
    """One metaclass per SystemUnitClass; typed child elements become
    unbounded containment references."""
    if not doc.system_unit_class_libs:
        raise NoTypeContent(f"{doc.file_name or 'document'} has no SystemUnitClassLib")
    defs = [c for lib in doc.system_unit_class_libs for c in _flatten_classes(lib.classes)]
    names = [c.name for c in defs]
    for name in names:
        if names.count(name) > 1:
            raise DuplicateClassName(f"class {name!r} defined {names.count(name)} times")
    classes = []
    for cdef in defs:
        attributes = tuple(MetaAttribute(a.name, _datatype(a, cdef.name)) for a in cdef.attributes)
        references = []
        for child in cdef.children:
            target = _class_name(child.ref_base_system_unit_path)
            if target not in names:
                raise UnresolvedClassPath(
                    f"{cdef.name}/{child.name}: RefBaseSystemUnitPath {child.ref_base_system_unit_path!r} "
                    "names no known class"
                )
            references.append(MetaReference(child.name, target, containment=True, upper_bound=None))
        classes.append(MetaClass(cdef.name, attributes, tuple(references)))
    return TypeModel(doc.system_unit_class_libs[0].name, tuple(classes))


def caex_to_instancemodel(doc: CaexDocument, tm: TypeModel) -> InstanceModel:
    """One object per InternalElement, id = slash-joined name path."""
    objects: list[ModelObject] = []

    def visit(element: CaexElement, parent_path: str) -> ModelObject:
        object_id = f"{parent_path}/{element.name}" if parent_path else element.name
        class_name = _class_name(element.ref_base_system_unit_path) if element.ref_base_system_unit_path else ""
        cls = tm.get_class(class_name)
        if cls is None:
            raise UnresolvedClassPath(
                f"{object_id}: RefBaseSystemUnitPath {element.ref_base_system_unit_path!r} names no class of {tm.name!r}"
            )
        slots = {}
        for attr in element.attributes:
            if attr.value is None or not attr.value.strip():
                continue
            meta = cls.attribute(attr.name)
            if meta is None:
                # kept so that conformance checking reports it
                slots[attr.name] = attr.value.strip()
                continue
            try:
                slots[attr.name] = parse_scalar(meta.datatype, attr.value)
            except ValueError:
                raise ValueParseError(object_id, attr.name, attr.value, meta.datatype) from None
        position = len(objects)
        objects.append(ModelObject(object_id, cls.name, slots, {}))

        links: dict[str, list[str]] = {}
        for child in element.children:
            child_obj = visit(child, object_id)
            refs = [r for r in cls.references if r.containment and r.target_class == child_obj.class_name]
            if not refs:
                log.warning("%s: no containment reference of %s holds a %s", child_obj.id, cls.name, child_obj.class_name)
                continue
            links.setdefault(refs[0].name, []).append(child_obj.id)
        obj = ModelObject(object_id, cls.name, slots, {k: tuple(v) for k, v in links.items()})
        objects[position] = obj
        return obj

    for hierarchy in doc.instance_hierarchies:
        for element in hierarchy.elements:
            visit(element, "")
    name = doc.instance_hierarchies[0].name if doc.instance_hierarchies else doc.file_name
    return InstanceModel(name, tm, tuple(objects))
