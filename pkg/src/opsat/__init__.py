"""Exact toolkit for operator-assignment satisfiability of Boolean constraint languages."""

from .errors import CapExceeded, InputError, OpsatError, ParseError, PredicateError, VerificationError
from .model import BooleanRelation, Constraint, ConstraintLanguage, Instance, boolean_value

__version__ = "0.1.0"

__all__ = [
    "OpsatError", "InputError", "ParseError", "CapExceeded", "PredicateError", "VerificationError",
    "BooleanRelation", "ConstraintLanguage", "Constraint", "Instance", "boolean_value", "__version__",
]
