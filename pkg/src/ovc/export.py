"""Ecore- and XMI-flavoured XML exports of type and instance models.

Both formats are small, documented subsets (see docs/formats.md); they are
interchange artefacts, not round-trippable Eclipse files.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

from .model import (
    DataType,
    ExportRejected,
    InstanceModel,
    ModelObject,
    TypeModel,
    check_conformance,
    format_scalar,
    root_objects,
)

ECORE_NS = "http://www.eclipse.org/emf/2002/Ecore"
XMI_NS = "http://www.omg.org/XMI"
XSI_NS = "http://www.w3.org/2001/XMLSchema-instance"
XMI_VERSION = "2.0"

ECORE_TYPES = {
    DataType.STRING: "EString",
    DataType.INTEGER: "EInt",
    DataType.REAL: "EDouble",
    DataType.BOOLEAN: "EBoolean",
}


def _to_bytes(root: ET.Element) -> bytes:
    ET.indent(root, space="  ")
    body = ET.tostring(root, encoding="unicode", short_empty_elements=True)
    return ('<?xml version="1.0" encoding="UTF-8"?>\n' + body + "\n").encode("utf-8")


def _ns_uri(package: str) -> str:
    return f"urn:ovc:{package}"


def export_ecore_subset(tm: TypeModel) -> bytes:
    root = ET.Element("ecore:EPackage")
    root.set("xmlns:xmi", XMI_NS)
    root.set("xmlns:xsi", XSI_NS)
    root.set("xmlns:ecore", ECORE_NS)
    root.set("name", tm.name)
    root.set("nsURI", _ns_uri(tm.name))
    root.set("nsPrefix", tm.name)
    for cls in tm.classes:
        classifier = ET.SubElement(root, "eClassifiers")
        classifier.set("xsi:type", "ecore:EClass")
        classifier.set("name", cls.name)
        for attr in cls.attributes:
            feature = ET.SubElement(classifier, "eStructuralFeatures")
            feature.set("xsi:type", "ecore:EAttribute")
            feature.set("name", attr.name)
            feature.set("eType", f"ecore:EDataType {ECORE_NS}#//{ECORE_TYPES[attr.datatype]}")
        for ref in cls.references:
            feature = ET.SubElement(classifier, "eStructuralFeatures")
            feature.set("xsi:type", "ecore:EReference")
            feature.set("name", ref.name)
            feature.set("eType", f"#//{ref.target_class}")
            feature.set("upperBound", "-1" if ref.upper_bound is None else str(ref.upper_bound))
            if ref.containment:
                feature.set("containment", "true")
    return _to_bytes(root)


def export_xmi_subset(im: InstanceModel) -> bytes:
    errors = check_conformance(im)
    if errors:
        raise ExportRejected(errors)
    prefix = im.conforms_to.name
    root = ET.Element("xmi:XMI")
    root.set("xmi:version", XMI_VERSION)
    root.set("xmlns:xmi", XMI_NS)
    root.set("xmlns:xsi", XSI_NS)
    root.set(f"xmlns:{prefix}", _ns_uri(prefix))
    root.set("name", im.name)
    for obj in root_objects(im):
        element = ET.SubElement(root, f"{prefix}:{obj.class_name}")
        _fill(element, obj, im)
    return _to_bytes(root)


def _fill(element: ET.Element, obj: ModelObject, im: InstanceModel) -> None:
    element.set("xmi:id", obj.id)
    cls = im.conforms_to.get_class(obj.class_name)
    for attr in cls.attributes:
        if attr.name in obj.slots:
            element.set(attr.name, format_scalar(obj.slots[attr.name]))
    for ref in cls.references:
        targets = obj.links.get(ref.name, ())
        if not targets:
            continue
        if ref.containment:
            for target_id in targets:
                child_obj = im.get(target_id)
                child = ET.SubElement(element, ref.name)
                child.set("xsi:type", f"{im.conforms_to.name}:{child_obj.class_name}")
                _fill(child, child_obj, im)
        else:
            element.set(ref.name, " ".join(targets))
