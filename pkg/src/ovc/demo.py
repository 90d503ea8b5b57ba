"""The shop-floor demo: two shells, three submodels and the bundled fixtures."""

from __future__ import annotations

from importlib import resources

from .aas import FileElement, Property, Reference, RelationshipElement, Repository, Shell, Submodel
from .aml import caex_to_instancemodel, caex_to_typemodel, parse_caex
from .export import export_ecore_subset, export_xmi_subset
from .model import DataType
from .pipeline import PipelineConfig

AAS1_ID = "https://example.org/ovc/demo/aas1"
AAS2_ID = "https://example.org/ovc/demo/aas2"
INFO_SUBMODEL_ID = "https://example.org/ovc/demo/aas1-info"
CONSTRAINT_SUBMODEL_ID = "https://example.org/ovc/demo/aas2-constraints"
RESULT_SUBMODEL_ID = "https://example.org/ovc/demo/aas2-results"

TYPE_FIXTURE = "DemoProductionProcessesTypemodel.aml"
INSTANCE_FIXTURES = {
    "successful": "DemoShopfloorInstanceModel.aml",
    "violated": "DemoShopfloorInstanceModel_Violated.aml",
}
CONSTRAINT_FIXTURE = "demo.ocl"

TEMPERATURE_ID_SHORT = "Dynamic_Attribute_currentTemperature"
TEMPERATURE_TARGET = ("DemoShopFloor", "currentTemperature")
SEEDED_TEMPERATURE = {"successful": 22.5, "violated": 35.0}
VARIANTS = tuple(INSTANCE_FIXTURES)

AML_CONTENT_TYPE = "application/automationml-aml+xml"


def fixture_bytes(name: str) -> bytes:
    return resources.files("ovc.fixtures").joinpath(name).read_bytes()


def demo_config() -> PipelineConfig:
    return PipelineConfig(INFO_SUBMODEL_ID, CONSTRAINT_SUBMODEL_ID, RESULT_SUBMODEL_ID)


def _info_submodel(variant: str, cfg: PipelineConfig) -> Submodel:
    instance_name = INSTANCE_FIXTURES[variant]
    return Submodel(
        INFO_SUBMODEL_ID,
        "Semantic_Information_Models",
        (
            FileElement(cfg.type_file_id_short, AML_CONTENT_TYPE, TYPE_FIXTURE, fixture_bytes(TYPE_FIXTURE)),
            FileElement(cfg.instance_file_id_short, AML_CONTENT_TYPE, instance_name, fixture_bytes(instance_name)),
            Property(TEMPERATURE_ID_SHORT, DataType.REAL, SEEDED_TEMPERATURE[variant]),
            RelationshipElement(
                "Type_Instance_Relationship",
                Reference.to_element(INFO_SUBMODEL_ID, cfg.type_file_id_short),
                Reference.to_element(INFO_SUBMODEL_ID, cfg.instance_file_id_short),
            ),
            RelationshipElement(
                TEMPERATURE_ID_SHORT + "_Mapping",
                Reference.to_element(INFO_SUBMODEL_ID, TEMPERATURE_ID_SHORT),
                Reference.to_model_attribute(*TEMPERATURE_TARGET),
            ),
        ),
    )


def _constraint_submodel(cfg: PipelineConfig) -> Submodel:
    tm = caex_to_typemodel(parse_caex(fixture_bytes(TYPE_FIXTURE), TYPE_FIXTURE))
    elements = [
        FileElement(cfg.constraint_file_id_short, "text/plain; charset=utf-8", CONSTRAINT_FIXTURE, fixture_bytes(CONSTRAINT_FIXTURE)),
        FileElement("Ecore_Model", "application/xml", "demo.ecore", export_ecore_subset(tm)),
    ]
    for variant, name in INSTANCE_FIXTURES.items():
        im = caex_to_instancemodel(parse_caex(fixture_bytes(name), name), tm)
        elements.append(FileElement(f"XMI_Instance_{variant.capitalize()}", "application/xml", f"{im.name}.xmi", export_xmi_subset(im)))
    return Submodel(CONSTRAINT_SUBMODEL_ID, "Semantic_Constraint_Models", tuple(elements))


def seed_demo(repo: Repository, variant: str = "successful") -> PipelineConfig:
    """Upsert the demo shells and submodels; the result submodel is reset."""
    if variant not in INSTANCE_FIXTURES:
        raise ValueError(f"unknown variant {variant!r}, expected one of {', '.join(VARIANTS)}")
    cfg = demo_config()
    with repo.writer():
        repo.put_submodel(_info_submodel(variant, cfg))
        repo.put_submodel(_constraint_submodel(cfg))
        repo.put_submodel(Submodel(RESULT_SUBMODEL_ID, "Model_Validation_Results"))
        repo.put_shell(Shell(AAS1_ID, "AAS1_Production", (INFO_SUBMODEL_ID,)))
        repo.put_shell(Shell(AAS2_ID, "AAS2_Constraints", (CONSTRAINT_SUBMODEL_ID, RESULT_SUBMODEL_ID)))
    return cfg
