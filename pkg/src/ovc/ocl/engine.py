"""Invariant evaluation over whole instance models and report assembly."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime

from ..errors import OvcError
from ..model import InstanceModel, all_instances_of
from ..report import ConstraintResult, ValidationReport, Verdict, utcnow
from .ast import EQUALITY_OPS, RELATIONAL_OPS, Binary, ConstraintDocument, Expr, Invariant, IteratorCall, Literal, to_source
from .evaluator import EvaluationFault, Evaluator
from .typecheck import TypeCheckError, typecheck
from .values import UNDEFINED, ObjectRef, format_value


class RejectedUntyped(OvcError):
    def __init__(self, errors: list[TypeCheckError]) -> None:
        self.errors = errors
        super().__init__("constraints do not type-check: " + "; ".join(str(e) for e in errors))


@dataclass(frozen=True)
class InvariantOutcome:
    invariant_name: str
    context_class: str
    per_object: tuple[tuple[str, Verdict], ...]

    @property
    def overall(self) -> Verdict:
        verdicts = [v for _, v in self.per_object]
        if all(v is Verdict.SATISFIED for v in verdicts):
            return Verdict.SATISFIED
        if Verdict.VIOLATED in verdicts:
            return Verdict.VIOLATED
        return Verdict.UNDEFINED


def _verdict(value: object, inv: Invariant, object_id: str) -> Verdict:
    if value is UNDEFINED:
        return Verdict.UNDEFINED
    if value is True:
        return Verdict.SATISFIED
    if value is False:
        return Verdict.VIOLATED
    raise EvaluationFault(f"{inv.name} on {object_id} produced non-Boolean {value!r}")


def evaluate_invariant(inv: Invariant, im: InstanceModel) -> InvariantOutcome:
    per_object = []
    for obj in all_instances_of(im, inv.context_class):
        value = Evaluator(im, obj).eval(inv.body)
        per_object.append((obj.id, _verdict(value, inv, obj.id)))
    return InvariantOutcome(inv.name, inv.context_class, tuple(per_object))


def _why_false(expr: Expr, ev: Evaluator) -> str:
    """Name the innermost sub-expression that made ``expr`` false."""
    if isinstance(expr, Binary):
        if expr.op == "and":
            if ev.eval(expr.lhs) is False:
                return _why_false(expr.lhs, ev)
            return _why_false(expr.rhs, ev)
        if expr.op == "implies":
            return _why_false(expr.rhs, ev)
        if expr.op in EQUALITY_OPS + RELATIONAL_OPS:
            operands = [
                f"{to_source(side)} = {format_value(ev.eval(side))}"
                for side in (expr.lhs, expr.rhs)
                if not isinstance(side, Literal)
            ]
            detail = f" ({', '.join(operands)})" if operands else ""
            return f"{to_source(expr)} is false{detail}"
    return f"{to_source(expr)} is false"


def _unique(ids: list[str]) -> tuple[str, ...]:
    return tuple(dict.fromkeys(ids))


def _constraint_result(inv: Invariant, im: InstanceModel) -> ConstraintResult:
    outcome = evaluate_invariant(inv, im)
    status = outcome.overall
    violating: list[str] = []
    notes: list[str] = []
    for object_id, verdict in outcome.per_object:
        if verdict is Verdict.SATISFIED:
            continue
        ev = Evaluator(im, im.get(object_id))
        if verdict is Verdict.UNDEFINED:
            ev.eval(inv.body)
            notes.append(f"{object_id}: undefined because {ev.undefined_origin or 'a sub-expression is undefined'}")
            continue
        if isinstance(inv.body, IteratorCall) and inv.body.kind == "isUnique":
            groups = ev.duplicate_groups(inv.body)
            members = [m for _, elements in groups for m in elements]
            if members and all(isinstance(m, ObjectRef) for m in members):
                violating.extend(m.id for m in members)
                for key, elements in groups:
                    note = (
                        f"{to_source(inv.body.body)} = {format_value(key)} is shared by "
                        + ", ".join(e.id for e in elements)
                    )
                    if note not in notes:
                        notes.append(note)
                continue
        violating.append(object_id)
        notes.append(f"{object_id}: {_why_false(inv.body, ev)}")

    if status is Verdict.SATISFIED:
        count = len(outcome.per_object)
        message = (
            f"satisfied by all {count} {inv.context_class} object(s)"
            if count
            else f"no {inv.context_class} objects (vacuously satisfied)"
        )
    else:
        message = "; ".join(notes)
    return ConstraintResult(
        constraint_name=inv.name,
        context_class=inv.context_class,
        status=status,
        violating_object_ids=_unique(violating) if status is Verdict.VIOLATED else (),
        message=message,
    )


def run_constraints(
    doc: ConstraintDocument, im: InstanceModel, timestamp: datetime | None = None
) -> ValidationReport:
    errors = typecheck(doc, im.conforms_to)
    if errors:
        raise RejectedUntyped(errors)
    results = tuple(_constraint_result(inv, im) for inv in doc.invariants)
    return ValidationReport(im.name, timestamp or utcnow(), results)
