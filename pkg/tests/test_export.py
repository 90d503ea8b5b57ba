from __future__ import annotations

import dataclasses
import xml.etree.ElementTree as ET

import pytest

from ovc.export import export_ecore_subset, export_xmi_subset
from ovc.model import ExportRejected, ModelObject, TypeModel

XSI_TYPE = "{http://www.w3.org/2001/XMLSchema-instance}type"
XMI_ID = "{http://www.omg.org/XMI}id"


def test_ecore_classifiers(demo_tm):
    root = ET.fromstring(export_ecore_subset(demo_tm))
    classifiers = root.findall("eClassifiers")
    assert [c.get("name") for c in classifiers] == ["ShopFloor", "ManufacturingProcess"]
    features = {f.get("name"): f for c in classifiers for f in c.findall("eStructuralFeatures")}
    assert features["currentTemperature"].get("eType").endswith("//EDouble")
    assert features["processSequenceOrder"].get("eType").endswith("//EInt")
    assert features["processType"].get("eType").endswith("//EString")
    processes = features["processes"]
    assert processes.get(XSI_TYPE) == "ecore:EReference"
    assert processes.get("containment") == "true"
    assert processes.get("upperBound") == "-1"
    assert processes.get("eType") == "#//ManufacturingProcess"


def test_ecore_empty_and_deterministic(demo_tm):
    root = ET.fromstring(export_ecore_subset(TypeModel("Empty")))
    assert root.findall("eClassifiers") == []
    assert export_ecore_subset(demo_tm) == export_ecore_subset(demo_tm)


def test_ecore_layout(demo_tm):
    data = export_ecore_subset(demo_tm)
    assert data.startswith(b"<?xml")
    assert data.endswith(b"\n") and b"\r" not in data
    assert b"\n  <eClassifiers" in data


def test_xmi_objects(demo_im):
    data = export_xmi_subset(demo_im)
    root = ET.fromstring(data)
    assert root.get("{http://www.omg.org/XMI}version") == "2.0"
    ids = [e.get(XMI_ID) for e in root.iter() if e.get(XMI_ID)]
    assert len(ids) == len(demo_im.objects) == 5
    processes = [e for e in root.iter("processes")]
    assert len(processes) == 4
    assert [p.get("processSequenceOrder") for p in processes] == ["1", "2", "3", "4"]
    assert export_xmi_subset(demo_im) == data


def test_xmi_rejects_dangling(demo_im):
    shop = demo_im.get("DemoShopFloor")
    broken = dataclasses.replace(shop, links={"processes": shop.links["processes"] + ("missing",)})
    im = dataclasses.replace(demo_im, objects=(broken,) + demo_im.objects[1:])
    with pytest.raises(ExportRejected) as exc:
        export_xmi_subset(im)
    assert [e.kind for e in exc.value.errors] == ["DanglingLink"]


def test_xmi_non_containment_links():
    from ovc.model import InstanceModel, MetaClass, MetaReference

    tm = TypeModel("T", (MetaClass("N", (), (MetaReference("next", "N"),)),))
    im = InstanceModel("m", tm, (ModelObject("a", "N", {}, {"next": ("b",)}), ModelObject("b", "N")))
    root = ET.fromstring(export_xmi_subset(im))
    first = [e for e in root if e.get(XMI_ID) == "a"][0]
    assert first.get("next") == "b"
