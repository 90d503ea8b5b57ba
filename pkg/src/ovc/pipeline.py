"""The validation component: five steps from shell content to stored report.

1. fetch the AML type model file and convert it to a type model
2. fetch the AML instance model file and map it onto that type model
3. inject dynamic Property values into the instance model
4. fetch the constraint file, type-check and evaluate it
5. write text and JSON reports plus a relationship back into the shell

Each step function raises :class:`PipelineError` carrying the step number
and the underlying error.  Nothing is written unless all of steps 1-4
succeed, and step 5 is a single submodel write.
"""

from __future__ import annotations

import warnings
from contextlib import contextmanager
from dataclasses import dataclass
from datetime import datetime
from typing import Iterator

from .aas import FileElement, NotFound, Property, Reference, RelationshipElement, Repository
from .aas.model import MalformedEntity, check_id_short
from .aml import UnresolvedClassPath, caex_to_instancemodel, caex_to_typemodel, parse_caex
from .errors import OvcError
from .model import (
    ConformanceError,
    DataType,
    InstanceModel,
    TypeMismatch,
    TypeModel,
    check_conformance,
    set_slot,
)
from .ocl import ConstraintDocument, RejectedUntyped, parse, run_constraints, typecheck
from .report import ReportFormatError, ValidationReport, parse_json, render_json, render_text

STEP_NAMES = {
    1: "fetch type model",
    2: "fetch instance model",
    3: "inject dynamic values",
    4: "fetch and evaluate constraints",
    5: "write results",
}

TEXT_SUFFIX = "_Result_Text"
JSON_SUFFIX = "_Result_Json"
LINK_SUFFIX = "_Result_Link"


class MissingArtifact(OvcError):
    pass


class ConformanceFailed(OvcError):
    def __init__(self, errors: list[ConformanceError]) -> None:
        self.errors = errors
        super().__init__(f"instance model does not conform: {'; '.join(str(e) for e in errors)}")


class PipelineError(OvcError):
    def __init__(self, step: int, cause: Exception) -> None:
        self.step = step
        self.cause = cause
        super().__init__(f"step {step} ({STEP_NAMES[step]}) failed: {type(cause).__name__}: {cause}")


class InjectionWarning(UserWarning):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    info_submodel_id: str
    constraint_submodel_id: str
    result_submodel_id: str
    type_file_id_short: str = "InformationModel_Type"
    instance_file_id_short: str = "InformationModel_Instance"
    constraint_file_id_short: str = "Constraint_Model"

    def __post_init__(self) -> None:
        for name in ("info_submodel_id", "constraint_submodel_id", "result_submodel_id"):
            if not getattr(self, name):
                raise ValueError(f"{name} must not be empty")
        for name in ("type_file_id_short", "instance_file_id_short", "constraint_file_id_short"):
            try:
                check_id_short(getattr(self, name))
            except MalformedEntity as exc:
                raise ValueError(f"{name}: {exc}") from None


@contextmanager
def _step(number: int) -> Iterator[None]:
    try:
        yield
    except PipelineError:
        raise
    except OvcError as exc:
        raise PipelineError(number, exc) from exc


def _artifact(repo: Repository, submodel_id: str, id_short: str) -> FileElement:
    try:
        element = repo.get_element(submodel_id, id_short)
    except NotFound as exc:
        raise MissingArtifact(f"no File element {id_short!r} in submodel {submodel_id!r} ({exc})") from exc
    if not isinstance(element, FileElement):
        raise MissingArtifact(f"{id_short!r} in {submodel_id!r} is a {type(element).__name__}, not a File")
    if not element.attachment:
        raise MissingArtifact(f"File element {id_short!r} in {submodel_id!r} has no attachment")
    return element


def fetch_type_model(repo: Repository, cfg: PipelineConfig) -> TypeModel:
    with _step(1):
        artifact = _artifact(repo, cfg.info_submodel_id, cfg.type_file_id_short)
        return caex_to_typemodel(parse_caex(artifact.attachment, artifact.file_name))


def fetch_instance_model(repo: Repository, cfg: PipelineConfig, tm: TypeModel) -> InstanceModel:
    with _step(2):
        artifact = _artifact(repo, cfg.info_submodel_id, cfg.instance_file_id_short)
        doc = parse_caex(artifact.attachment, artifact.file_name)
        try:
            im = caex_to_instancemodel(doc, tm)
        except UnresolvedClassPath as exc:
            raise ConformanceFailed([ConformanceError(artifact.file_name, "UnknownClass", str(exc))]) from exc
        errors = check_conformance(im)
        if errors:
            raise ConformanceFailed(errors)
        return im


def _compatible(value_type: DataType, datatype: DataType) -> bool:
    return value_type is datatype or (value_type is DataType.INTEGER and datatype is DataType.REAL)


def inject_dynamic_values(repo: Repository, cfg: PipelineConfig, im: InstanceModel) -> InstanceModel:
    """Copy Property values into the slots their relationships point at.

    Mappings that cannot be resolved are reported as InjectionWarning and
    skipped; a Property whose type cannot fill the slot is an error.
    """
    with _step(3):
        try:
            info = repo.get_submodel(cfg.info_submodel_id)
        except NotFound as exc:
            raise MissingArtifact(str(exc)) from exc
        for element in info.elements:
            if not isinstance(element, RelationshipElement):
                continue
            target = element.second.model_attribute_target()
            if target is None:
                continue
            object_id, attr_name = target
            source = element.first.element_target()
            prop = None
            if source is not None:
                try:
                    prop = repo.get_element(*source)
                except NotFound:
                    pass
            if not isinstance(prop, Property):
                warnings.warn(f"{element.id_short}: source is not a resolvable Property", InjectionWarning, stacklevel=3)
                continue
            if prop.value is None:
                warnings.warn(f"{element.id_short}: {prop.id_short} has no value", InjectionWarning, stacklevel=3)
                continue
            obj = im.get(object_id)
            if obj is None:
                warnings.warn(f"{element.id_short}: no object {object_id!r}", InjectionWarning, stacklevel=3)
                continue
            meta = im.conforms_to.get_class(obj.class_name).attribute(attr_name)
            if meta is None:
                warnings.warn(
                    f"{element.id_short}: {obj.class_name} has no attribute {attr_name!r}", InjectionWarning, stacklevel=3
                )
                continue
            if not _compatible(prop.value_type, meta.datatype):
                raise TypeMismatch(
                    f"{prop.id_short} is {prop.value_type.value} but {object_id}.{attr_name} is {meta.datatype.value}"
                )
            im = set_slot(im, object_id, attr_name, prop.value)
        return im


def fetch_constraints(repo: Repository, cfg: PipelineConfig, tm: TypeModel) -> ConstraintDocument:
    with _step(4):
        artifact = _artifact(repo, cfg.constraint_submodel_id, cfg.constraint_file_id_short)
        try:
            text = artifact.attachment.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MissingArtifact(f"{artifact.file_name} is not UTF-8 text") from exc
        doc = parse(text)
        errors = typecheck(doc, tm)
        if errors:
            raise RejectedUntyped(errors)
        return doc


def result_id_shorts(cfg: PipelineConfig) -> tuple[str, str, str]:
    base = cfg.instance_file_id_short
    return base + TEXT_SUFFIX, base + JSON_SUFFIX, base + LINK_SUFFIX


def write_results(repo: Repository, cfg: PipelineConfig, report: ValidationReport) -> tuple[Reference, Reference]:
    """Store both renderings of ``report`` and link them to the instance file.

    Returns references to the text and JSON File elements.
    """
    with _step(5):
        text_id, json_id, link_id = result_id_shorts(cfg)
        stem = f"{report.instance_name}_ValidationResult"
        text_ref = Reference.to_element(cfg.result_submodel_id, text_id)
        json_ref = Reference.to_element(cfg.result_submodel_id, json_id)
        link = RelationshipElement(
            link_id, Reference.to_element(cfg.info_submodel_id, cfg.instance_file_id_short), json_ref
        )
        repo.put_elements(
            cfg.result_submodel_id,
            [
                FileElement(text_id, "text/plain; charset=utf-8", f"{stem}.txt", render_text(report).encode("utf-8")),
                FileElement(json_id, "application/json", f"{stem}.json", render_json(report).encode("utf-8")),
                link,
            ],
        )
        return text_ref, json_ref


def run_pipeline(repo: Repository, cfg: PipelineConfig, timestamp: datetime | None = None) -> ValidationReport:
    with repo.writer():
        tm = fetch_type_model(repo, cfg)
        im = fetch_instance_model(repo, cfg, tm)
        im = inject_dynamic_values(repo, cfg, im)
        doc = fetch_constraints(repo, cfg, tm)
        with _step(4):
            report = run_constraints(doc, im, timestamp)
        write_results(repo, cfg, report)
        return report


def stored_reports(repo: Repository, cfg: PipelineConfig) -> list[ValidationReport]:
    """Every JSON report held in the result submodel."""
    try:
        sm = repo.get_submodel(cfg.result_submodel_id)
    except NotFound:
        return []
    reports = []
    for element in sm.elements:
        if isinstance(element, FileElement) and element.id_short.endswith(JSON_SUFFIX):
            try:
                reports.append(parse_json(element.attachment))
            except ReportFormatError:
                continue
    return reports


def latest_report(repo: Repository, cfg: PipelineConfig) -> ValidationReport | None:
    reports = stored_reports(repo, cfg)
    return max(reports, key=lambda r: r.timestamp) if reports else None
