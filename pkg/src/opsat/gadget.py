"""Gadget reductions through pp-definitions and the constructive operator lift.

Given an instance I over a language A and, for every relation R of A, a
pp-formula over B that defines R, ``build_J`` replaces each constraint by
the atoms of its formula (with fresh copies of the quantified variables)
and ``build_J_hat`` also adds a T-constraint on every pair of variables of
a block.  ``lift`` turns a satisfying operator assignment of I into one of
J (or J-hat) by diagonalizing each scope simultaneously and picking Boolean
witnesses eigenvector by eigenvector.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Mapping

from .classify import PpFormula, first_witness, formula_from_json, identity_formula, pp_defines
from .errors import InputError, ParseError, VerificationError
from .matrix import OperatorAssignment, diag, operator_value
from .model import T as FULL2
from .model import BooleanRelation, ConstraintLanguage, Instance, is_const, language_from_json
from .spectral import inverse_conjugate, joint_eigen

RESERVED = re.compile(r"B\d+__")


def fresh_name(index: int, bound: str) -> str:
    return f"B{index}__{bound}"


@dataclass(frozen=True)
class PpDefinitionSet:
    target: ConstraintLanguage
    source: ConstraintLanguage
    formulas: Mapping[str, PpFormula]

    def __init__(self, target: Mapping[str, BooleanRelation], source: Mapping[str, BooleanRelation],
                 formulas: Mapping[str, PpFormula]):
        target = ConstraintLanguage(target)
        source = ConstraintLanguage(source)
        for name, phi in formulas.items():
            if name not in target:
                raise InputError(f"definition given for unknown target relation {name!r}",
                                 code="unknown_relation")
            rel = target[name]
            if phi.arity != rel.arity:
                raise VerificationError(
                    f"formula for {name!r} has {phi.arity} free variables, relation has arity {rel.arity}",
                    code="unverified_definition")
            got = pp_defines(phi, source)
            if got != rel:
                raise VerificationError(f"formula for {name!r} does not define it over the source language",
                                        code="unverified_definition")
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "formulas", dict(formulas))

    def __hash__(self):
        return hash((self.target, self.source, frozenset(self.formulas.items())))

    def to_json(self) -> dict:
        return {
            "source": self.source.to_json(),
            "definitions": {n: phi.to_json() for n, phi in self.formulas.items()},
        }


def definitions_from_json(doc, target: Mapping[str, BooleanRelation]) -> PpDefinitionSet:
    if not isinstance(doc, dict) or "source" not in doc or "definitions" not in doc:
        raise ParseError("definitions need 'source' and 'definitions'", code="malformed", context="$")
    source = language_from_json(doc["source"], "source")
    formulas = {n: formula_from_json(f, f"definitions.{n}") for n, f in doc["definitions"].items()}
    return PpDefinitionSet(target, source, formulas)


def identity_definitions(lang: Mapping[str, BooleanRelation]) -> PpDefinitionSet:
    return PpDefinitionSet(lang, lang, {n: identity_formula(n, r.arity) for n, r in lang.items()})


@dataclass(frozen=True)
class ReductionOutput:
    instance: Instance
    blocks: tuple[tuple[str, ...], ...]
    extended: bool
    t_name: str | None = None

    def to_json(self) -> dict:
        doc = self.instance.to_json()
        doc["blocks"] = [{"constraint": i, "variables": list(b)} for i, b in enumerate(self.blocks)]
        doc["extended"] = self.extended
        return doc


def _check_source(inst: Instance, defs: PpDefinitionSet) -> None:
    for v in inst.variables:
        if RESERVED.match(v):
            raise InputError(f"variable {v!r} uses the reserved prefix B<n>__", code="reserved_name")
    for i, (rel, _) in enumerate(inst.constraints):
        if rel not in defs.formulas:
            raise InputError(f"no definition for relation {rel!r}", code="missing_definition",
                             context=f"constraints[{i}]")
        if defs.target.get(rel) != inst.language[rel]:
            raise InputError(f"relation {rel!r} differs from the definitions' target", code="unknown_relation",
                             context=f"constraints[{i}]")


def build_J(inst: Instance, defs: PpDefinitionSet) -> ReductionOutput:
    _check_source(inst, defs)
    variables = list(inst.variables)
    constraints = []
    blocks = []
    for i, (rel, scope) in enumerate(inst.constraints):
        phi = defs.formulas[rel]
        sub = dict(zip(phi.free, scope))
        fresh = [fresh_name(i, y) for y in phi.bound]
        sub.update(zip(phi.bound, fresh))
        variables.extend(fresh)
        for arel, ascope in phi.atoms:
            constraints.append((arel, [e if is_const(e) else sub[e] for e in ascope]))
        block = list(dict.fromkeys(e for e in scope if not is_const(e))) + fresh
        blocks.append(tuple(block))
    return ReductionOutput(Instance(defs.source, variables, constraints), tuple(blocks), False)


def _t_language(lang: ConstraintLanguage) -> tuple[ConstraintLanguage, str]:
    name = "T"
    k = 0
    while name in lang and lang[name] != FULL2:
        k += 1
        name = f"T{k}"
    if name in lang:
        return lang, name
    return lang.union({name: FULL2}), name


def build_J_hat(inst: Instance, defs: PpDefinitionSet) -> ReductionOutput:
    base = build_J(inst, defs)
    lang, tname = _t_language(base.instance.language)
    extra = [(tname, pair) for block in base.blocks for pair in itertools.combinations(block, 2)]
    j = base.instance
    hat = Instance(lang, j.variables, list(j.constraints) + extra)
    return ReductionOutput(hat, base.blocks, True, tname)


def block_commutes(g: OperatorAssignment, blocks) -> bool:
    for block in blocks:
        for u, v in itertools.combinations(block, 2):
            if not g[u].commutes(g[v]):
                return False
    return True


def lift(f: OperatorAssignment, inst: Instance, defs: PpDefinitionSet, out: ReductionOutput,
         check: bool = True) -> OperatorAssignment:
    """Extend a satisfying assignment of ``inst`` to the fresh variables of ``out``."""
    if operator_value(f, inst) != 1:
        raise VerificationError("the assignment does not satisfy the source instance", code="not_satisfying")
    new = {}
    for i, (rel_name, scope) in enumerate(inst.constraints):
        phi = defs.formulas[rel_name]
        if not phi.bound:
            continue
        rel = inst.language[rel_name]
        svars = list(dict.fromkeys(e for e in scope if not is_const(e)))
        pos = {v: k for k, v in enumerate(svars)}
        dec = joint_eigen([f[v] for v in svars], dim=f.dim)
        witnesses: dict[tuple, tuple] = {}
        cols = []
        for j in range(f.dim):
            a = tuple(e if is_const(e) else dec.diags[pos[e]][j] for e in scope)
            if a not in rel:
                raise AssertionError(f"joint eigenvalue tuple {a} of constraint {i} is not in the relation")
            if a not in witnesses:
                b = first_witness(phi, defs.source, a)
                if b is None:
                    raise AssertionError(f"formula for {rel_name!r} has no witness at {a}")
                witnesses[a] = b
            cols.append(witnesses[a])
        for k, y in enumerate(phi.bound):
            new[fresh_name(i, y)] = inverse_conjugate(dec.C, diag([c[k] for c in cols]))
    g = f.extend(new)
    if check:
        if operator_value(g, out.instance) != 1:
            raise AssertionError("lifted assignment does not satisfy the reduced instance")
        if not block_commutes(g, out.blocks):
            raise AssertionError("lifted assignment does not commute on a block")
    return g


def lift_hat(f: OperatorAssignment, inst: Instance, defs: PpDefinitionSet) -> tuple[OperatorAssignment, ReductionOutput]:
    out = build_J_hat(inst, defs)
    return lift(f, inst, defs, out), out


def project(g: OperatorAssignment, inst: Instance, out: ReductionOutput) -> OperatorAssignment:
    """Restrict a satisfying assignment of the extended instance to the source variables."""
    if not out.extended:
        raise InputError("projection is only supported for the extended instance", code="not_extended")
    if operator_value(g, out.instance) != 1:
        raise VerificationError("the assignment does not satisfy the extended instance", code="not_satisfying")
    f = g.restrict(inst.variables)
    if operator_value(f, inst) != 1:
        raise AssertionError("restriction does not satisfy the source instance")
    return f


__all__ = [
    "PpDefinitionSet", "ReductionOutput", "definitions_from_json", "identity_definitions",
    "build_J", "build_J_hat", "lift", "lift_hat", "project", "fresh_name", "block_commutes",
]
