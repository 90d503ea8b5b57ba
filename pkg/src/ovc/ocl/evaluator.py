"""Three-valued evaluation of OCL expressions over an instance model.

Undefined handling for the binary connectives is left-to-right
short-circuiting::

    false and X   = false        true or X   = true
    false implies X = true

for any X (including Undefined); every other combination with an Undefined
operand is Undefined.  ``forAll``/``exists`` are order independent: a
deciding element (false resp. true) wins over Undefined elements.
"""

from __future__ import annotations

from typing import Sequence, Union

from ..errors import OvcError
from ..model import InstanceModel, ModelObject
from .ast import (
    AllInstances,
    Binary,
    CollectionLiteral,
    CollectionOp,
    Expr,
    IfThenElse,
    IteratorCall,
    Literal,
    Nav,
    SelfRef,
    Unary,
    VarRef,
    to_source,
)
from .values import UNDEFINED, ObjectRef, OclValue, is_number, ocl_equal

# ("var", name, value) binds an explicit iterator variable;
# ("implicit", element) marks an iterator without a declared variable.
Frame = Union[tuple[str, str, OclValue], tuple[str, OclValue]]


class EvaluationFault(OvcError):
    """The evaluator met a state the type checker should have ruled out."""


class Evaluator:
    """Evaluates expressions with one fixed ``self`` object.

    ``undefined_origin`` records where the first Undefined value was
    produced (a missing slot, an empty reference, a division by zero).
    """

    def __init__(self, im: InstanceModel, self_object: ModelObject | None = None) -> None:
        self.im = im
        self.tm = im.conforms_to
        self.self_ref = ObjectRef(self_object.id) if self_object is not None else None
        self.undefined_origin: str | None = None

    def _undefined(self, origin: str) -> OclValue:
        if self.undefined_origin is None:
            self.undefined_origin = origin
        return UNDEFINED

    def eval(self, expr: Expr, scope: Sequence[Frame] = ()) -> OclValue:
        method = getattr(self, f"_eval_{type(expr).__name__}", None)
        if method is None:
            raise EvaluationFault(f"cannot evaluate {expr!r}")
        return method(expr, scope)

    # -- leaves -----------------------------------------------------------

    def _eval_Literal(self, expr: Literal, scope: Sequence[Frame]) -> OclValue:
        return expr.value

    def _eval_CollectionLiteral(self, expr: CollectionLiteral, scope: Sequence[Frame]) -> OclValue:
        items = [self.eval(item, scope) for item in expr.items]
        if any(item is UNDEFINED for item in items):
            return UNDEFINED
        return tuple(items)

    def _eval_SelfRef(self, expr: SelfRef, scope: Sequence[Frame]) -> OclValue:
        if self.self_ref is None:
            raise EvaluationFault("'self' used without a context object")
        return self.self_ref

    def _eval_AllInstances(self, expr: AllInstances, scope: Sequence[Frame]) -> OclValue:
        if self.tm.get_class(expr.class_name) is None:
            raise EvaluationFault(f"unknown class {expr.class_name!r}")
        return tuple(ObjectRef(obj.id) for obj in self.im.objects if obj.class_name == expr.class_name)

    def _eval_VarRef(self, expr: VarRef, scope: Sequence[Frame]) -> OclValue:
        for frame in reversed(scope):
            if frame[0] == "var":
                if frame[1] == expr.name:
                    return frame[2]
            elif isinstance(frame[1], ObjectRef) and self._has_feature(frame[1], expr.name):
                return self._navigate(frame[1], expr.name)
        if self.self_ref is not None and self._has_feature(self.self_ref, expr.name):
            return self._navigate(self.self_ref, expr.name)
        raise EvaluationFault(f"unresolved name {expr.name!r}")

    # -- navigation -------------------------------------------------------

    def _object(self, ref: ObjectRef) -> ModelObject:
        obj = self.im.get(ref.id)
        if obj is None:
            raise EvaluationFault(f"dangling object reference {ref.id!r}")
        return obj

    def _has_feature(self, ref: ObjectRef, name: str) -> bool:
        cls = self.tm.get_class(self._object(ref).class_name)
        return cls is not None and (cls.attribute(name) is not None or cls.reference(name) is not None)

    def _navigate(self, ref: ObjectRef, name: str) -> OclValue:
        obj = self._object(ref)
        cls = self.tm.get_class(obj.class_name)
        if cls is None:
            raise EvaluationFault(f"object {obj.id!r} has unknown class {obj.class_name!r}")
        if cls.attribute(name) is not None:
            if name not in obj.slots:
                return self._undefined(f"{obj.id}.{name} has no value")
            return obj.slots[name]
        meta_ref = cls.reference(name)
        if meta_ref is None:
            raise EvaluationFault(f"{cls.name} has no feature {name!r}")
        targets = obj.links.get(name, ())
        if meta_ref.many:
            return tuple(ObjectRef(t) for t in targets)
        if not targets:
            return self._undefined(f"{obj.id}.{name} is empty")
        return ObjectRef(targets[0])

    def _eval_Nav(self, expr: Nav, scope: Sequence[Frame]) -> OclValue:
        receiver = self.eval(expr.receiver, scope)
        if receiver is UNDEFINED:
            return UNDEFINED
        if isinstance(receiver, ObjectRef):
            return self._navigate(receiver, expr.name)
        if isinstance(receiver, tuple):
            # Shorthand for collect().
            out: list[OclValue] = []
            for item in receiver:
                if not isinstance(item, ObjectRef):
                    raise EvaluationFault(f"cannot navigate .{expr.name} on {item!r}")
                value = self._navigate(item, expr.name)
                if value is UNDEFINED:
                    return UNDEFINED
                out.extend(value if isinstance(value, tuple) else (value,))
            return tuple(out)
        raise EvaluationFault(f"cannot navigate .{expr.name} on {receiver!r}")

    # -- operators --------------------------------------------------------

    def _boolean(self, value: OclValue, expr: Expr) -> OclValue:
        if value is not UNDEFINED and type(value) is not bool:
            raise EvaluationFault(f"expected Boolean from {to_source(expr)}, got {value!r}")
        return value

    def _eval_Binary(self, expr: Binary, scope: Sequence[Frame]) -> OclValue:
        op = expr.op
        if op in ("and", "or", "implies", "xor"):
            lhs = self._boolean(self.eval(expr.lhs, scope), expr.lhs)
            if op == "and" and lhs is False:
                return False
            if op == "or" and lhs is True:
                return True
            if op == "implies" and lhs is False:
                return True
            if lhs is UNDEFINED:
                return UNDEFINED
            rhs = self._boolean(self.eval(expr.rhs, scope), expr.rhs)
            if op == "xor":
                return UNDEFINED if rhs is UNDEFINED else lhs != rhs
            # lhs is the neutral element here: true and X, false or X, true implies X
            return rhs

        lhs = self.eval(expr.lhs, scope)
        rhs = self.eval(expr.rhs, scope)
        if lhs is UNDEFINED or rhs is UNDEFINED:
            return UNDEFINED
        if op == "=":
            return ocl_equal(lhs, rhs)
        if op == "<>":
            return not ocl_equal(lhs, rhs)
        if not (is_number(lhs) and is_number(rhs)):
            raise EvaluationFault(f"operator {op} needs numbers, got {lhs!r} and {rhs!r}")
        if op == "<":
            return lhs < rhs
        if op == "<=":
            return lhs <= rhs
        if op == ">":
            return lhs > rhs
        if op == ">=":
            return lhs >= rhs
        if op == "+":
            return lhs + rhs
        if op == "-":
            return lhs - rhs
        if op == "*":
            return lhs * rhs
        if op == "/":
            if rhs == 0:
                return self._undefined(f"division by zero in {to_source(expr)}")
            return lhs / rhs
        raise EvaluationFault(f"unknown operator {op!r}")

    def _eval_Unary(self, expr: Unary, scope: Sequence[Frame]) -> OclValue:
        value = self.eval(expr.operand, scope)
        if value is UNDEFINED:
            return UNDEFINED
        if expr.op == "not":
            return not self._boolean(value, expr.operand)
        if not is_number(value):
            raise EvaluationFault(f"unary minus needs a number, got {value!r}")
        return -value

    def _eval_IfThenElse(self, expr: IfThenElse, scope: Sequence[Frame]) -> OclValue:
        cond = self._boolean(self.eval(expr.cond, scope), expr.cond)
        if cond is UNDEFINED:
            return UNDEFINED
        return self.eval(expr.then if cond else expr.else_, scope)

    # -- collections ------------------------------------------------------

    def _collection(self, expr: Expr, scope: Sequence[Frame]) -> OclValue:
        value = self.eval(expr, scope)
        if value is not UNDEFINED and not isinstance(value, tuple):
            raise EvaluationFault(f"{to_source(expr)} is not a collection")
        return value

    def _body(self, call: IteratorCall, element: OclValue, scope: Sequence[Frame]) -> OclValue:
        frame: Frame = ("var", call.var, element) if call.var is not None else ("implicit", element)
        return self.eval(call.body, (*scope, frame))

    def _eval_IteratorCall(self, expr: IteratorCall, scope: Sequence[Frame]) -> OclValue:
        source = self._collection(expr.receiver, scope)
        if source is UNDEFINED:
            return UNDEFINED
        kind = expr.kind
        if kind in ("forAll", "exists"):
            decisive = kind == "exists"
            saw_undefined = False
            for element in source:
                value = self._boolean(self._body(expr, element, scope), expr.body)
                if value is UNDEFINED:
                    saw_undefined = True
                elif value is decisive:
                    return decisive
            return UNDEFINED if saw_undefined else not decisive
        if kind in ("select", "reject"):
            keep = kind == "select"
            kept = []
            for element in source:
                value = self._boolean(self._body(expr, element, scope), expr.body)
                if value is UNDEFINED:
                    return UNDEFINED
                if value is keep:
                    kept.append(element)
            return tuple(kept)
        if kind == "collect":
            collected: list[OclValue] = []
            for element in source:
                value = self._body(expr, element, scope)
                if value is UNDEFINED:
                    return UNDEFINED
                collected.extend(value if isinstance(value, tuple) else (value,))
            return tuple(collected)
        if kind == "isUnique":
            groups = self.duplicate_groups(expr, scope)
            if groups is UNDEFINED:
                return UNDEFINED
            return not groups
        raise EvaluationFault(f"unknown iterator {kind!r}")

    def duplicate_groups(
        self, call: IteratorCall, scope: Sequence[Frame] = ()
    ) -> list[tuple[OclValue, list[OclValue]]] | OclValue:
        """Group the receiver's elements by the ``isUnique`` key.

        Returns ``[(key, elements), ...]`` for keys shared by two or more
        elements, or UNDEFINED if the receiver or any key is Undefined.
        """
        source = self._collection(call.receiver, scope)
        if source is UNDEFINED:
            return UNDEFINED
        keys = []
        for element in source:
            key = self._body(call, element, scope)
            if key is UNDEFINED:
                return UNDEFINED
            keys.append(key)
        groups: list[tuple[OclValue, list[OclValue]]] = []
        claimed = [False] * len(keys)
        for i in range(len(keys)):
            if claimed[i]:
                continue
            members = [j for j in range(i + 1, len(keys)) if not claimed[j] and ocl_equal(keys[i], keys[j])]
            if members:
                for j in members:
                    claimed[j] = True
                groups.append((keys[i], [source[i]] + [source[j] for j in members]))
        return groups

    def _eval_CollectionOp(self, expr: CollectionOp, scope: Sequence[Frame]) -> OclValue:
        source = self._collection(expr.receiver, scope)
        if source is UNDEFINED:
            return UNDEFINED
        kind = expr.kind
        if kind == "size":
            return len(source)
        if kind == "isEmpty":
            return not source
        if kind == "notEmpty":
            return bool(source)
        if kind == "includes":
            needle = self.eval(expr.arg, scope)
            if needle is UNDEFINED:
                return UNDEFINED
            return any(ocl_equal(item, needle) for item in source)
        if kind == "sum":
            if not all(is_number(item) for item in source):
                raise EvaluationFault(f"sum() over non-numeric collection {to_source(expr.receiver)}")
            return sum(source, 0.0 if any(type(i) is float for i in source) else 0)
        if kind == "asSet":
            unique: list[OclValue] = []
            for item in source:
                if not any(ocl_equal(item, u) for u in unique):
                    unique.append(item)
            return tuple(unique)
        raise EvaluationFault(f"unknown collection operation {kind!r}")


def evaluate_expr(expr: Expr, self_object: ModelObject | None, im: InstanceModel) -> OclValue:
    return Evaluator(im, self_object).eval(expr)
