"""Runtime values produced by OCL evaluation.

Scalars are plain Python ``bool``/``int``/``float``/``str``; collections are
tuples; model objects are :class:`ObjectRef`; the single bottom value is
:data:`UNDEFINED`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


class _Undefined:
    _instance: _Undefined | None = None

    def __new__(cls) -> _Undefined:
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Undefined"

    def __bool__(self) -> bool:
        raise TypeError("Undefined has no truth value")

    def __reduce__(self) -> str:
        return "UNDEFINED"


UNDEFINED = _Undefined()


@dataclass(frozen=True)
class ObjectRef:
    id: str

    def __str__(self) -> str:
        return self.id


OclValue = Union[bool, int, float, str, ObjectRef, tuple, _Undefined]


def is_number(value: object) -> bool:
    return type(value) is int or type(value) is float


def ocl_equal(a: OclValue, b: OclValue) -> bool:
    """Value equality; Integer and Real compare numerically, Boolean never
    equals a number."""
    if is_number(a) and is_number(b):
        return a == b
    if type(a) is not type(b):
        return False
    if isinstance(a, tuple):
        return len(a) == len(b) and all(ocl_equal(x, y) for x, y in zip(a, b))
    return a == b


def format_value(value: OclValue) -> str:
    if value is UNDEFINED:
        return "Undefined"
    if type(value) is bool:
        return "true" if value else "false"
    if type(value) is str:
        return f"'{value}'"
    if isinstance(value, tuple):
        return "Sequence{" + ", ".join(format_value(v) for v in value) + "}"
    return str(value)
