"""OCL invariant subset: parsing, type checking and three-valued evaluation."""

from .ast import ConstraintDocument, Invariant, document_to_source, to_source
from .engine import InvariantOutcome, RejectedUntyped, evaluate_invariant, run_constraints
from .evaluator import EvaluationFault, Evaluator, evaluate_expr
from .parser import DuplicateInvariant, ParseError, parse, parse_expr
from .typecheck import TypeCheckError, typecheck
from .values import UNDEFINED, ObjectRef, ocl_equal

__all__ = [
    "UNDEFINED",
    "ConstraintDocument",
    "DuplicateInvariant",
    "EvaluationFault",
    "Evaluator",
    "Invariant",
    "InvariantOutcome",
    "ObjectRef",
    "ParseError",
    "RejectedUntyped",
    "TypeCheckError",
    "document_to_source",
    "evaluate_expr",
    "evaluate_invariant",
    "ocl_equal",
    "parse",
    "parse_expr",
    "run_constraints",
    "to_source",
    "typecheck",
]
