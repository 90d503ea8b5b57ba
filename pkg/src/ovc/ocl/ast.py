"""Expression tree for the OCL invariant subset, plus a pretty-printer.

Node positions are informational and excluded from equality, so a printed
and re-parsed tree compares equal to the original.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

Pos = tuple[int, int]

ITERATOR_KINDS = ("forAll", "exists", "select", "reject", "collect", "isUnique")
COLLECTION_OPS = ("size", "isEmpty", "notEmpty", "includes", "sum", "asSet")
# Ops that take exactly one argument; the rest take none.
COLLECTION_OPS_WITH_ARG = ("includes",)

LOGICAL_OPS = ("and", "or", "xor", "implies")
EQUALITY_OPS = ("=", "<>")
RELATIONAL_OPS = ("<", "<=", ">", ">=")
ARITHMETIC_OPS = ("+", "-", "*", "/")

# Binding strength, loosest first (OCL 2.4 ordering).
PRECEDENCE = {
    "implies": 1,
    "xor": 2,
    "or": 3,
    "and": 4,
    "=": 5,
    "<>": 5,
    "<": 6,
    "<=": 6,
    ">": 6,
    ">=": 6,
    "+": 7,
    "-": 7,
    "*": 8,
    "/": 8,
}
UNARY_PRECEDENCE = 9
POSTFIX_PRECEDENCE = 10


@dataclass(frozen=True)
class Literal:
    value: Union[bool, int, float, str]
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class CollectionLiteral:
    items: tuple[Expr, ...]
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class SelfRef:
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class VarRef:
    """A bare identifier: iterator variable, or a feature of an implicit
    iterator element or of ``self``."""

    name: str
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Nav:
    """``receiver.name``; attribute or reference is decided by the type model."""

    receiver: Expr
    name: str
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class AllInstances:
    class_name: str
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class IteratorCall:
    receiver: Expr
    kind: str
    var: Optional[str]  # None: implicit iterator
    body: Expr
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class CollectionOp:
    receiver: Expr
    kind: str
    arg: Optional[Expr] = None
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Binary:
    op: str
    lhs: Expr
    rhs: Expr
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Unary:
    op: str  # "not" or "-"
    operand: Expr
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class IfThenElse:
    cond: Expr
    then: Expr
    else_: Expr
    pos: Pos = field(default=(0, 0), compare=False)


Expr = Union[
    Literal,
    CollectionLiteral,
    SelfRef,
    VarRef,
    Nav,
    AllInstances,
    IteratorCall,
    CollectionOp,
    Binary,
    Unary,
    IfThenElse,
]


@dataclass(frozen=True)
class Invariant:
    context_class: str
    name: str
    body: Expr
    pos: Pos = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class ConstraintDocument:
    source_text: str = field(compare=False)
    invariants: tuple[Invariant, ...] = ()

    def get(self, name: str) -> Invariant | None:
        for inv in self.invariants:
            if inv.name == name:
                return inv
        return None


def _precedence(expr: Expr) -> int:
    if isinstance(expr, Binary):
        return PRECEDENCE[expr.op]
    if isinstance(expr, Unary):
        return UNARY_PRECEDENCE
    if isinstance(expr, IfThenElse):
        return 0
    if isinstance(expr, Literal) and type(expr.value) in (int, float) and math.copysign(1, expr.value) < 0:
        return UNARY_PRECEDENCE
    return POSTFIX_PRECEDENCE


def _quote(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace("'", "\\'").replace("\n", "\\n").replace("\t", "\\t")
    return f"'{escaped}'"


def _format_literal(value: Union[bool, int, float, str]) -> str:
    if type(value) is bool:
        return "true" if value else "false"
    if type(value) is str:
        return _quote(value)
    return repr(value)


def _wrap(expr: Expr, min_prec: int) -> str:
    text = to_source(expr)
    return f"({text})" if _precedence(expr) < min_prec else text


def to_source(expr: Expr) -> str:
    """Render ``expr`` as OCL text that parses back to an equal tree."""
    if isinstance(expr, Literal):
        return _format_literal(expr.value)
    if isinstance(expr, CollectionLiteral):
        return "Sequence{" + ", ".join(to_source(item) for item in expr.items) + "}"
    if isinstance(expr, SelfRef):
        return "self"
    if isinstance(expr, VarRef):
        return expr.name
    if isinstance(expr, AllInstances):
        return f"{expr.class_name}.allInstances()"
    if isinstance(expr, Nav):
        return f"{_wrap(expr.receiver, POSTFIX_PRECEDENCE)}.{expr.name}"
    if isinstance(expr, IteratorCall):
        head = f"{expr.var} | " if expr.var is not None else ""
        return f"{_wrap(expr.receiver, POSTFIX_PRECEDENCE)}->{expr.kind}({head}{to_source(expr.body)})"
    if isinstance(expr, CollectionOp):
        arg = to_source(expr.arg) if expr.arg is not None else ""
        return f"{_wrap(expr.receiver, POSTFIX_PRECEDENCE)}->{expr.kind}({arg})"
    if isinstance(expr, Unary):
        operand = _wrap(expr.operand, UNARY_PRECEDENCE)
        if expr.op == "not":
            return f"not {operand}"
        # "--" would start a comment
        if operand.startswith("-"):
            operand = f"({operand})"
        return f"-{operand}"
    if isinstance(expr, Binary):
        prec = PRECEDENCE[expr.op]
        return f"{_wrap(expr.lhs, prec)} {expr.op} {_wrap(expr.rhs, prec + 1)}"
    if isinstance(expr, IfThenElse):
        return f"if {to_source(expr.cond)} then {to_source(expr.then)} else {to_source(expr.else_)} endif"
    raise TypeError(f"not an OCL expression node: {expr!r}")


def document_to_source(doc: ConstraintDocument) -> str:
    return "".join(
        f"context {inv.context_class} inv {inv.name}:\n  {to_source(inv.body)}\n\n" for inv in doc.invariants
    )
