"""Boolean relations, constraint languages and instances.

Truth values are encoded multiplicatively: ``+1`` is false and ``-1`` is
true.  Tuples are kept in the canonical lexicographic order in which
``-1 < +1`` (plain numeric order).
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple, Union

from .errors import ParseError

PM = (-1, 1)
NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

ScopeEntry = Union[str, int]
Assignment = Mapping[str, int]


def cube(n: int) -> Iterator[tuple[int, ...]]:
    """All points of {-1,+1}^n in canonical order."""
    return itertools.product(PM, repeat=n)


def is_const(entry: ScopeEntry) -> bool:
    return isinstance(entry, int)


def entry_token(entry: ScopeEntry) -> str:
    if is_const(entry):
        return "+1" if entry == 1 else "-1"
    return entry


def parse_entry(token, context: str = "") -> ScopeEntry:
    if token == "+1":
        return 1
    if token == "-1":
        return -1
    if isinstance(token, str) and NAME_RE.match(token):
        return token
    raise ParseError(f"bad scope entry {token!r}", code="invalid_value", context=context)


@dataclass(frozen=True)
class BooleanRelation:
    arity: int
    tuples: tuple[tuple[int, ...], ...]
    _members: frozenset = field(init=False, repr=False, compare=False)

    def __init__(self, arity: int, tuples: Iterable[Iterable[int]] = ()):
        if not isinstance(arity, int) or isinstance(arity, bool) or arity < 1:
            raise ValueError(f"arity must be a positive integer, got {arity!r}")
        seen = set()
        for t in tuples:
            t = tuple(t)
            if len(t) != arity:
                raise ValueError(f"tuple {t} has length {len(t)}, expected {arity}")
            if any(v not in PM or isinstance(v, bool) for v in t):
                raise ValueError(f"tuple {t} has entries outside {{+1,-1}}")
            seen.add(t)
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "tuples", tuple(sorted(seen)))
        object.__setattr__(self, "_members", frozenset(seen))

    def __contains__(self, t) -> bool:
        return tuple(t) in self._members

    def __len__(self) -> int:
        return len(self.tuples)

    def __iter__(self):
        return iter(self.tuples)

    def complement(self) -> "BooleanRelation":
        return BooleanRelation(self.arity, (t for t in cube(self.arity) if t not in self._members))

    @classmethod
    def full(cls, arity: int) -> "BooleanRelation":
        return cls(arity, cube(arity))

    @classmethod
    def empty(cls, arity: int) -> "BooleanRelation":
        return cls(arity, ())

    @classmethod
    def from_predicate(cls, arity: int, pred: Callable[..., bool]) -> "BooleanRelation":
        return cls(arity, (t for t in cube(arity) if pred(*t)))

    def to_json(self) -> dict:
        return {"arity": self.arity, "tuples": [list(t) for t in self.tuples]}


def full_relation(arity: int) -> BooleanRelation:
    return BooleanRelation.full(arity)


def empty_relation(arity: int) -> BooleanRelation:
    return BooleanRelation.empty(arity)


def one_in(k: int) -> BooleanRelation:
    """Exactly one coordinate true."""
    return BooleanRelation.from_predicate(k, lambda *t: t.count(-1) == 1)


def parity_relation(arity: int, b: int) -> BooleanRelation:
    """Tuples whose product is ``b``."""
    def pred(*t):
        p = 1
        for v in t:
            p *= v
        return p == b
    return BooleanRelation.from_predicate(arity, pred)


def clause_relation(signs: Iterable[int]) -> BooleanRelation:
    """Relation of the clause with literal signs ``signs``: everything except ``signs`` itself.

    A positive literal has sign +1 and is falsified by the value +1.
    """
    signs = tuple(signs)
    return BooleanRelation(len(signs), (t for t in cube(len(signs)) if t != signs))


def clause_name(signs: Iterable[int]) -> str:
    return "cl_" + "".join("p" if s == 1 else "n" for s in signs)


T = full_relation(2)
F = empty_relation(1)
R13 = one_in(3)
R12 = one_in(2)
R11 = one_in(1)
EVEN3 = parity_relation(3, 1)
ODD3 = parity_relation(3, -1)
EQ2 = BooleanRelation(2, [(-1, -1), (1, 1)])
OR2 = clause_relation((1, 1))


class ConstraintLanguage(Mapping[str, BooleanRelation]):
    """Immutable mapping from relation names to relations."""

    __slots__ = ("_rels",)

    def __init__(self, relations: Mapping[str, BooleanRelation] | Iterable = ()):
        items = relations.items() if isinstance(relations, Mapping) else relations
        rels: dict[str, BooleanRelation] = {}
        for name, rel in items:
            if not isinstance(name, str) or not name:
                raise ValueError(f"relation names must be nonempty strings, got {name!r}")
            if name in rels:
                raise ValueError(f"duplicate relation name {name!r}")
            if not isinstance(rel, BooleanRelation):
                raise TypeError(f"relation {name!r} is not a BooleanRelation")
            rels[name] = rel
        object.__setattr__(self, "_rels", MappingProxyType(rels))

    def __setattr__(self, key, value):
        raise AttributeError("ConstraintLanguage is immutable")

    def __getitem__(self, name: str) -> BooleanRelation:
        return self._rels[name]

    def __iter__(self):
        return iter(self._rels)

    def __len__(self) -> int:
        return len(self._rels)

    def __hash__(self):
        return hash(frozenset(self._rels.items()))

    def __repr__(self) -> str:
        return f"ConstraintLanguage({dict(self._rels)!r})"

    def union(self, other: Mapping[str, BooleanRelation]) -> "ConstraintLanguage":
        merged = dict(self._rels)
        for name, rel in other.items():
            if name in merged and merged[name] != rel:
                raise ValueError(f"conflicting definitions of relation {name!r}")
            merged[name] = rel
        return ConstraintLanguage(merged)

    def to_json(self) -> dict:
        return {name: rel.to_json() for name, rel in self._rels.items()}


class Constraint(NamedTuple):
    relation: str
    scope: tuple[ScopeEntry, ...]


@dataclass(frozen=True)
class Instance:
    language: ConstraintLanguage
    variables: tuple[str, ...]
    constraints: tuple[Constraint, ...]

    def __init__(self, language, variables: Iterable[str], constraints: Iterable = ()):
        if not isinstance(language, ConstraintLanguage):
            language = ConstraintLanguage(language)
        variables = tuple(variables)
        cons = tuple(Constraint(rel, tuple(scope)) for rel, scope in constraints)
        object.__setattr__(self, "language", language)
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "constraints", cons)
        self._validate()

    def _validate(self) -> None:
        declared = set()
        for pos, v in enumerate(self.variables):
            ctx = f"variables[{pos}]"
            if not isinstance(v, str) or not NAME_RE.match(v):
                raise ParseError(f"bad variable name {v!r}", code="invalid_value", context=ctx)
            if v in declared:
                raise ParseError(f"variable {v!r} declared twice", code="invalid_value", context=ctx)
            declared.add(v)
        for i, (rel, scope) in enumerate(self.constraints):
            ctx = f"constraints[{i}]"
            if rel not in self.language:
                raise ParseError(f"unknown relation {rel!r}", code="unknown_relation", context=ctx)
            arity = self.language[rel].arity
            if len(scope) != arity:
                raise ParseError(
                    f"scope of length {len(scope)} for relation {rel!r} of arity {arity}",
                    code="arity_mismatch", context=ctx)
            for j, e in enumerate(scope):
                if is_const(e):
                    if e not in PM or isinstance(e, bool):
                        raise ParseError(f"bad constant {e!r}", code="invalid_value",
                                         context=f"{ctx}.scope[{j}]")
                elif e not in declared:
                    raise ParseError(f"undeclared variable {e!r}", code="undeclared_variable",
                                     context=f"{ctx}.scope[{j}]")

    @property
    def m(self) -> int:
        return len(self.constraints)

    def relation(self, i: int) -> BooleanRelation:
        return self.language[self.constraints[i].relation]

    def to_json(self) -> dict:
        return {
            "language": self.language.to_json(),
            "variables": list(self.variables),
            "constraints": [
                {"relation": c.relation, "scope": [entry_token(e) for e in c.scope]}
                for c in self.constraints
            ],
        }


def scope_values(scope: Iterable[ScopeEntry], a: Assignment) -> tuple[int, ...]:
    return tuple(e if is_const(e) else a[e] for e in scope)


def boolean_value(inst: Instance, a: Assignment) -> Fraction:
    """Fraction of constraints satisfied by the Boolean assignment ``a``."""
    missing = [v for v in inst.variables if v not in a]
    if missing:
        raise ValueError(f"assignment is partial, missing {missing}")
    if not inst.constraints:
        return Fraction(1)
    sat = sum(1 for rel, scope in inst.constraints if scope_values(scope, a) in inst.language[rel])
    return Fraction(sat, len(inst.constraints))


# ---------------------------------------------------------------- file formats

def load_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg}", code="malformed",
                         context=f"line {exc.lineno} column {exc.colno}") from None


def _expect(cond: bool, message: str, context: str) -> None:
    if not cond:
        raise ParseError(message, code="malformed", context=context)


def relation_from_json(doc, context: str = "relation") -> BooleanRelation:
    _expect(isinstance(doc, dict), "relation must be an object", context)
    arity, tuples = doc.get("arity"), doc.get("tuples")
    _expect(isinstance(arity, int) and not isinstance(arity, bool) and arity >= 1,
            "arity must be a positive integer", f"{context}.arity")
    _expect(isinstance(tuples, list), "tuples must be a list", f"{context}.tuples")
    for k, t in enumerate(tuples):
        ctx = f"{context}.tuples[{k}]"
        _expect(isinstance(t, list), "tuple must be a list", ctx)
        if len(t) != arity:
            raise ParseError(f"tuple of length {len(t)} in relation of arity {arity}",
                             code="arity_mismatch", context=ctx)
        for v in t:
            if v not in PM or isinstance(v, bool):
                raise ParseError(f"tuple entry {v!r} is not +1 or -1", code="invalid_value", context=ctx)
    return BooleanRelation(arity, tuples)


def language_from_json(doc, context: str = "language") -> ConstraintLanguage:
    _expect(isinstance(doc, dict), "language must be an object", context)
    rels = {}
    for name, rdoc in doc.items():
        _expect(bool(name), "relation names must be nonempty", context)
        rels[name] = relation_from_json(rdoc, f"{context}.{name}")
    return ConstraintLanguage(rels)


def instance_from_json(doc) -> Instance:
    _expect(isinstance(doc, dict), "instance must be an object", "$")
    for key in ("language", "variables", "constraints"):
        _expect(key in doc, f"missing field {key!r}", "$")
    language = language_from_json(doc["language"])
    variables = doc["variables"]
    _expect(isinstance(variables, list), "variables must be a list", "variables")
    cons = []
    _expect(isinstance(doc["constraints"], list), "constraints must be a list", "constraints")
    for i, c in enumerate(doc["constraints"]):
        ctx = f"constraints[{i}]"
        _expect(isinstance(c, dict) and "relation" in c and "scope" in c,
                "constraint needs 'relation' and 'scope'", ctx)
        _expect(isinstance(c["scope"], list), "scope must be a list", f"{ctx}.scope")
        _expect(isinstance(c["relation"], str), "relation must be a string", f"{ctx}.relation")
        scope = [parse_entry(tok, f"{ctx}.scope[{j}]") for j, tok in enumerate(c["scope"])]
        cons.append((c["relation"], scope))
    return Instance(language, variables, cons)


def parse_instance(text: str) -> Instance:
    return instance_from_json(load_json(text))


def dumps(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def serialize_instance(inst: Instance) -> str:
    return dumps(inst.to_json())


__all__ = [
    "PM", "cube", "ScopeEntry", "Assignment", "BooleanRelation", "ConstraintLanguage",
    "Constraint", "Instance", "boolean_value", "scope_values", "parse_instance",
    "serialize_instance", "instance_from_json", "language_from_json", "relation_from_json",
    "full_relation", "empty_relation", "one_in", "parity_relation", "clause_relation",
    "clause_name", "T", "F", "R13", "R12", "R11", "EVEN3", "ODD3", "EQ2", "OR2",
    "is_const", "entry_token", "parse_entry", "load_json", "dumps",
]
