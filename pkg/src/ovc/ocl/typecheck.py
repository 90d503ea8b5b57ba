"""Static checking of constraint documents against a type model."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from ..model import DataType, TypeModel
from .ast import (
    ARITHMETIC_OPS,
    EQUALITY_OPS,
    LOGICAL_OPS,
    RELATIONAL_OPS,
    AllInstances,
    Binary,
    CollectionLiteral,
    CollectionOp,
    ConstraintDocument,
    Expr,
    IfThenElse,
    Invariant,
    IteratorCall,
    Literal,
    Nav,
    SelfRef,
    Unary,
    VarRef,
    to_source,
)

BOOLEAN = DataType.BOOLEAN.value
INTEGER = DataType.INTEGER.value
REAL = DataType.REAL.value
STRING = DataType.STRING.value
# Unknown / already-reported type: compatible with everything, so one mistake
# yields one error.
ANY = "OclAny"


@dataclass(frozen=True)
class ObjectType:
    class_name: str

    def __str__(self) -> str:
        return self.class_name


@dataclass(frozen=True)
class CollectionType:
    element: OclType

    def __str__(self) -> str:
        return f"Collection({self.element})"


OclType = Union[str, ObjectType, CollectionType]


@dataclass(frozen=True)
class TypeCheckError:
    invariant: str
    kind: str  # UnknownClass, UnknownAttribute, OperandMismatch, NotBoolean, NotACollection
    message: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.invariant}: {self.kind}: {self.message}"


def _numeric(t: OclType) -> bool:
    return t in (INTEGER, REAL, ANY)


def _comparable(a: OclType, b: OclType) -> bool:
    if a == ANY or b == ANY:
        return True
    if a in (INTEGER, REAL) and b in (INTEGER, REAL):
        return True
    if isinstance(a, ObjectType) and isinstance(b, ObjectType):
        return True
    if isinstance(a, CollectionType) and isinstance(b, CollectionType):
        return _comparable(a.element, b.element)
    return a == b


def _join(a: OclType, b: OclType) -> OclType | None:
    """Common supertype of two branch/element types, None if incompatible."""
    if a == ANY:
        return b
    if b == ANY:
        return a
    if a == b:
        return a
    if a in (INTEGER, REAL) and b in (INTEGER, REAL):
        return REAL
    if isinstance(a, ObjectType) and isinstance(b, ObjectType):
        return ANY
    if isinstance(a, CollectionType) and isinstance(b, CollectionType):
        inner = _join(a.element, b.element)
        return None if inner is None else CollectionType(inner)
    return None


def _flatten(t: OclType) -> OclType:
    return t.element if isinstance(t, CollectionType) else t


# ("var", name, type) or ("implicit", element type)
Frame = Union[tuple[str, str, OclType], tuple[str, OclType]]


class _Checker:
    def __init__(self, tm: TypeModel, inv: Invariant) -> None:
        self.tm = tm
        self.inv = inv
        self.self_type = ObjectType(inv.context_class)
        self.errors: list[TypeCheckError] = []

    def error(self, kind: str, expr: Expr, message: str) -> OclType:
        line, column = expr.pos
        self.errors.append(TypeCheckError(self.inv.name, kind, message, line, column))
        return ANY

    def feature_type(self, owner: ObjectType, name: str) -> OclType | None:
        cls = self.tm.get_class(owner.class_name)
        if cls is None:
            return None
        attr = cls.attribute(name)
        if attr is not None:
            return attr.datatype.value
        ref = cls.reference(name)
        if ref is not None:
            target = ObjectType(ref.target_class)
            return CollectionType(target) if ref.many else target
        return None

    def check(self, expr: Expr, scope: Sequence[Frame] = ()) -> OclType:
        return getattr(self, f"_check_{type(expr).__name__}")(expr, scope)

    def _check_Literal(self, expr: Literal, scope: Sequence[Frame]) -> OclType:
        kind = type(expr.value)
        return {bool: BOOLEAN, int: INTEGER, float: REAL, str: STRING}[kind]

    def _check_CollectionLiteral(self, expr: CollectionLiteral, scope: Sequence[Frame]) -> OclType:
        element: OclType = ANY
        for item in expr.items:
            joined = _join(element, self.check(item, scope))
            if joined is None:
                return self.error("OperandMismatch", item, "collection literal mixes incompatible element types")
            element = joined
        return CollectionType(element)

    def _check_SelfRef(self, expr: SelfRef, scope: Sequence[Frame]) -> OclType:
        return self.self_type

    def _check_AllInstances(self, expr: AllInstances, scope: Sequence[Frame]) -> OclType:
        if self.tm.get_class(expr.class_name) is None:
            return self.error("UnknownClass", expr, f"no class {expr.class_name!r} in {self.tm.name!r}")
        return CollectionType(ObjectType(expr.class_name))

    def _check_VarRef(self, expr: VarRef, scope: Sequence[Frame]) -> OclType:
        for frame in reversed(scope):
            if frame[0] == "var":
                if frame[1] == expr.name:
                    return frame[2]
            elif isinstance(frame[1], ObjectType):
                found = self.feature_type(frame[1], expr.name)
                if found is not None:
                    return found
        found = self.feature_type(self.self_type, expr.name)
        if found is not None:
            return found
        return self.error(
            "UnknownAttribute", expr, f"{expr.name!r} is neither a variable nor a feature of {self.self_type}"
        )

    def _check_Nav(self, expr: Nav, scope: Sequence[Frame]) -> OclType:
        receiver = self.check(expr.receiver, scope)
        if receiver == ANY:
            return ANY
        owner = receiver.element if isinstance(receiver, CollectionType) else receiver
        if owner == ANY:
            return ANY
        if not isinstance(owner, ObjectType):
            return self.error("OperandMismatch", expr, f"cannot navigate .{expr.name} on {receiver}")
        found = self.feature_type(owner, expr.name)
        if found is None:
            return self.error("UnknownAttribute", expr, f"{owner} has no attribute or reference {expr.name!r}")
        if isinstance(receiver, CollectionType):
            return CollectionType(_flatten(found))
        return found

    def _check_IteratorCall(self, expr: IteratorCall, scope: Sequence[Frame]) -> OclType:
        receiver = self.check(expr.receiver, scope)
        if receiver == ANY:
            element: OclType = ANY
        elif isinstance(receiver, CollectionType):
            element = receiver.element
        else:
            self.error("NotACollection", expr, f"->{expr.kind} applied to {receiver}")
            element = ANY
        frame: Frame = ("var", expr.var, element) if expr.var is not None else ("implicit", element)
        body = self.check(expr.body, (*scope, frame))
        if expr.kind in ("forAll", "exists", "select", "reject") and body not in (BOOLEAN, ANY):
            self.error("NotBoolean", expr.body, f"->{expr.kind} body has type {body}, expected Boolean")
        if expr.kind in ("forAll", "exists", "isUnique"):
            return BOOLEAN
        if expr.kind in ("select", "reject"):
            return CollectionType(element)
        return CollectionType(_flatten(body))

    def _check_CollectionOp(self, expr: CollectionOp, scope: Sequence[Frame]) -> OclType:
        receiver = self.check(expr.receiver, scope)
        if receiver == ANY:
            element: OclType = ANY
        elif isinstance(receiver, CollectionType):
            element = receiver.element
        else:
            self.error("NotACollection", expr, f"->{expr.kind}() applied to {receiver}")
            element = ANY
        if expr.kind == "size":
            return INTEGER
        if expr.kind in ("isEmpty", "notEmpty"):
            return BOOLEAN
        if expr.kind == "includes":
            arg = self.check(expr.arg, scope)
            if not _comparable(element, arg):
                self.error("OperandMismatch", expr.arg, f"->includes({arg}) on a collection of {element}")
            return BOOLEAN
        if expr.kind == "sum":
            if not _numeric(element):
                return self.error("OperandMismatch", expr, f"->sum() over {element}")
            return INTEGER if element == ANY else element
        return CollectionType(element)

    def _check_Binary(self, expr: Binary, scope: Sequence[Frame]) -> OclType:
        lhs = self.check(expr.lhs, scope)
        rhs = self.check(expr.rhs, scope)
        op = expr.op
        if ANY in (lhs, rhs) and op not in EQUALITY_OPS + LOGICAL_OPS + RELATIONAL_OPS:
            return ANY
        if op in LOGICAL_OPS:
            if lhs not in (BOOLEAN, ANY) or rhs not in (BOOLEAN, ANY):
                return self.error("OperandMismatch", expr, f"'{op}' needs Boolean operands, got {lhs} and {rhs}")
            return BOOLEAN
        if op in EQUALITY_OPS:
            if not _comparable(lhs, rhs):
                return self.error("OperandMismatch", expr, f"cannot compare {lhs} with {rhs} using '{op}'")
            return BOOLEAN
        if not (_numeric(lhs) and _numeric(rhs)):
            return self.error("OperandMismatch", expr, f"'{op}' needs numeric operands, got {lhs} and {rhs}")
        if op in RELATIONAL_OPS:
            return BOOLEAN
        assert op in ARITHMETIC_OPS
        if op == "/" or REAL in (lhs, rhs):
            return REAL
        return INTEGER

    def _check_Unary(self, expr: Unary, scope: Sequence[Frame]) -> OclType:
        operand = self.check(expr.operand, scope)
        if operand == ANY:
            return BOOLEAN if expr.op == "not" else ANY
        if expr.op == "not":
            if operand != BOOLEAN:
                return self.error("OperandMismatch", expr, f"'not' needs a Boolean, got {operand}")
            return BOOLEAN
        if not _numeric(operand):
            return self.error("OperandMismatch", expr, f"unary '-' needs a number, got {operand}")
        return operand

    def _check_IfThenElse(self, expr: IfThenElse, scope: Sequence[Frame]) -> OclType:
        cond = self.check(expr.cond, scope)
        if cond not in (BOOLEAN, ANY):
            self.error("NotBoolean", expr.cond, f"if-condition has type {cond}")
        then = self.check(expr.then, scope)
        else_ = self.check(expr.else_, scope)
        joined = _join(then, else_)
        if joined is None:
            return self.error("OperandMismatch", expr, f"branches have incompatible types {then} and {else_}")
        return joined


def typecheck(doc: ConstraintDocument, tm: TypeModel) -> list[TypeCheckError]:
    errors: list[TypeCheckError] = []
    for inv in doc.invariants:
        checker = _Checker(tm, inv)
        if tm.get_class(inv.context_class) is None:
            checker.error("UnknownClass", inv, f"context class {inv.context_class!r} not in {tm.name!r}")
        else:
            body = checker.check(inv.body)
            if body not in (BOOLEAN, ANY):
                checker.error("NotBoolean", inv.body, f"body of {inv.name} has type {body}: {to_source(inv.body)}")
        errors.extend(checker.errors)
    return errors
