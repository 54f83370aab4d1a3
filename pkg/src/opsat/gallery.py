"""Canned objects: Pauli matrices, the magic-square system and its witness,
the Ji formula, clause gadgets, T-padding and first-kind gap certificates."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Mapping

from .classify import PpFormula
from .errors import InputError, VerificationError
from .fourier import fmt_fraction
from .gadget import PpDefinitionSet, build_J, lift
from .matrix import G, Matrix, OperatorAssignment, kron, operator_value, scalar_matrix, validate_assignment
from .model import (
    EVEN3, ODD3, R11, R12, R13, T, BooleanRelation, ConstraintLanguage, Instance, clause_name,
    clause_relation, parity_relation,
)
from .solve import solve_brute

PAULI = {
    "I": Matrix([[1, 0], [0, 1]]),
    "X": Matrix([[0, 1], [1, 0]]),
    "Y": Matrix([[0, G(0, -1)], [G(0, 1), 0]]),
    "Z": Matrix([[1, 0], [0, -1]]),
}


def pauli(word: str) -> Matrix:
    """Tensor product of Pauli factors, e.g. pauli("ZX") = Z (x) X."""
    return kron(*(PAULI[c] for c in word))


MERMIN_VARS = tuple(f"X{i}{j}" for i in (1, 2, 3) for j in (1, 2, 3))
MERMIN_LANGUAGE = ConstraintLanguage({"even3": EVEN3, "odd3": ODD3})

# rows: products +1; columns: +1, +1, -1
MERMIN_CONSTRAINTS = (
    ("even3", ("X11", "X12", "X13")),
    ("even3", ("X21", "X22", "X23")),
    ("even3", ("X31", "X32", "X33")),
    ("even3", ("X11", "X21", "X31")),
    ("even3", ("X12", "X22", "X32")),
    ("odd3", ("X13", "X23", "X33")),
)

MERMIN_SQUARE = {
    "X11": "ZI", "X12": "IZ", "X13": "ZZ",
    "X21": "IX", "X22": "XI", "X23": "XX",
    "X31": "ZX", "X32": "XZ", "X33": "YY",
}


def mermin_instance() -> Instance:
    return Instance(MERMIN_LANGUAGE, MERMIN_VARS, MERMIN_CONSTRAINTS)


def mermin_witness() -> OperatorAssignment:
    return OperatorAssignment(4, {v: pauli(MERMIN_SQUARE[v]) for v in MERMIN_VARS})


def mermin_rows(f: OperatorAssignment | None = None) -> list[list[Matrix]]:
    f = f or mermin_witness()
    return [[f[f"X{i}{j}"] for j in (1, 2, 3)] for i in (1, 2, 3)]


# ---------------------------------------------------------------- canned pp-definitions

def ji_formula() -> PpFormula:
    """T(Z1, Z2) = exists U1..U4: R13(Z1,U1,U4) & R13(Z2,U2,U4) & R13(U1,U2,U3)."""
    return PpFormula(
        ("Z1", "Z2"), ("U1", "U2", "U3", "U4"),
        [("R13", ("Z1", "U1", "U4")), ("R13", ("Z2", "U2", "U4")), ("R13", ("U1", "U2", "U3"))],
    )


@lru_cache(maxsize=None)
def ji_definitions() -> PpDefinitionSet:
    return PpDefinitionSet({"T": T}, {"R13": R13}, {"T": ji_formula()})


def t_instance(z1: str = "Z1", z2: str = "Z2") -> Instance:
    return Instance({"T": T}, [z1, z2], [("T", (z1, z2))])


ONE_IN_LANGUAGE = ConstraintLanguage({"R13": R13, "R12": R12, "R11": R11})


def clause_formula(signs) -> PpFormula:
    """Clause relation defined over {R13, R12, R11} without constants.

    Every atom has pairwise distinct variables.  The core is the chain
    R13(~l1, a, b) & R13(b, l2, c) & R13(c, d, ~l3); negated literals come
    from R12 and, for two-literal clauses, ~l3 is a variable pinned true by R11.
    """
    signs = tuple(signs)
    r = len(signs)
    if not 1 <= r <= 3:
        raise ValueError("clauses with one to three literals only")
    xs = [f"x{i + 1}" for i in range(r)]
    bound: list[str] = []
    atoms: list = []

    def fresh(name: str) -> str:
        bound.append(name)
        return name

    if r == 1:
        if signs[0] == 1:
            atoms.append(("R11", (xs[0],)))
        else:
            n = fresh("n1")
            atoms += [("R12", (xs[0], n)), ("R11", (n,))]
        return PpFormula(xs, bound, atoms)

    def literal(i: int) -> str:
        if signs[i] == 1:
            return xs[i]
        n = fresh(f"n{i + 1}")
        atoms.append(("R12", (xs[i], n)))
        return n

    def negated(i: int) -> str:
        if signs[i] == -1:
            return xs[i]
        q = fresh(f"q{i + 1}")
        atoms.append(("R12", (xs[i], q)))
        return q

    q1 = negated(0)
    l2 = literal(1)
    if r == 3:
        q3 = negated(2)
    else:
        q3 = fresh("t")
        atoms.append(("R11", (q3,)))
    a, b, c, d = (fresh(v) for v in "abcd")
    atoms += [("R13", (q1, a, b)), ("R13", (b, l2, c)), ("R13", (c, d, q3))]
    return PpFormula(xs, bound, atoms)


def all_clause_signs(max_len: int = 3):
    for r in range(1, max_len + 1):
        yield from itertools.product((1, -1), repeat=r)


@lru_cache(maxsize=None)
def clause_language(max_len: int = 3) -> ConstraintLanguage:
    return ConstraintLanguage({clause_name(s): clause_relation(s) for s in all_clause_signs(max_len)})


@lru_cache(maxsize=None)
def threesat_definitions() -> PpDefinitionSet:
    """Verified definitions of every clause relation with at most three literals."""
    formulas = {clause_name(s): clause_formula(s) for s in all_clause_signs()}
    return PpDefinitionSet(clause_language(), ONE_IN_LANGUAGE, formulas)


EVEN4 = parity_relation(4, 1)


def lin_definitions_even4() -> PpDefinitionSet:
    """even3 and odd3 from the single relation x1 x2 x3 x4 = +1, using constants.

    A quantified y carries x1 x2: even3 = exists y. even4(x1,x2,y,+1) & even4(y,x3,+1,+1)
    and odd3 flips one constant.
    """
    even = PpFormula(("x1", "x2", "x3"), ("y",),
                     [("even4", ("x1", "x2", "y", 1)), ("even4", ("y", "x3", 1, 1))])
    odd = PpFormula(("x1", "x2", "x3"), ("y",),
                    [("even4", ("x1", "x2", "y", 1)), ("even4", ("y", "x3", -1, 1))])
    return PpDefinitionSet(MERMIN_LANGUAGE, {"even4": EVEN4}, {"even3": even, "odd3": odd})


# ---------------------------------------------------------------- padding T-constraints

LIN3 = ConstraintLanguage({"even3": EVEN3, "odd3": ODD3})
SAT3 = ConstraintLanguage({clause_name(s): clause_relation(s) for s in itertools.product((1, -1), repeat=3)})


def _pad_names(inst: Instance, mode: str) -> tuple[str, ConstraintLanguage, BooleanRelation]:
    if mode == "3LIN":
        allowed, needed = LIN3, ODD3
    elif mode == "3SAT":
        allowed, needed = SAT3, clause_relation((1, 1, 1))
    else:
        raise InputError(f"unknown padding mode {mode!r}", code="wrong_mode")
    keep = {}
    for name, rel in inst.language.items():
        if rel == T:
            continue
        if rel not in allowed.values():
            raise InputError(f"relation {name!r} is not a {mode} relation", code="wrong_language")
        keep[name] = rel
    target = next((n for n, r in keep.items() if r == needed), None)
    if target is None:
        target = "odd3" if mode == "3LIN" else clause_name((1, 1, 1))
        k = 0
        base = target
        while target in keep or target in inst.language:
            k += 1
            target = f"{base}_{k}"
        keep[target] = needed
    return target, ConstraintLanguage(keep), needed


def _pad_var(i: int) -> str:
    return f"P{i}__Y"


def pad_T_constraints(inst: Instance, mode: str) -> Instance:
    """Replace T(Z1, Z2) by Z1 Z2 Y = -1 (3LIN) or by the clause Z1 | Z2 | Y (3SAT)."""
    target, lang, _ = _pad_names(inst, mode)
    variables = list(inst.variables)
    cons = []
    for i, (rel, scope) in enumerate(inst.constraints):
        if inst.language[rel] == T:
            y = _pad_var(i)
            if y in inst.variables:
                raise InputError(f"variable {y!r} clashes with the padding names", code="reserved_name")
            variables.append(y)
            cons.append((target, (scope[0], scope[1], y)))
        else:
            cons.append((rel, scope))
    return Instance(lang, variables, cons)


def pad_witness(f: OperatorAssignment, inst: Instance, mode: str) -> OperatorAssignment:
    """Forward construction: g(Y) = -f(Z2) f(Z1) for 3LIN and g(Y) = -I for 3SAT."""
    extra = {}
    for i, (rel, scope) in enumerate(inst.constraints):
        if inst.language[rel] != T:
            continue
        if mode == "3LIN":
            extra[_pad_var(i)] = -(f.value(scope[1]) @ f.value(scope[0]))
        elif mode == "3SAT":
            extra[_pad_var(i)] = scalar_matrix(-1, f.dim)
        else:
            raise InputError(f"unknown padding mode {mode!r}", code="wrong_mode")
    return f.extend(extra)


# ---------------------------------------------------------------- gap certificates

@dataclass(frozen=True)
class GapCertificate:
    instance: Instance
    boolean_max: Fraction
    boolean_witness: Mapping[str, int]
    witness: OperatorAssignment
    witness_dim: int
    kind: str = "first"

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "boolean_max": fmt_fraction(self.boolean_max),
            "boolean_attestation": "exhaustive search over all Boolean assignments",
            "boolean_argmax": {v: ("+1" if x == 1 else "-1") for v, x in self.boolean_witness.items()},
            "operator_value": fmt_fraction(operator_value(self.witness, self.instance)),
            "witness_dim": self.witness_dim,
            "instance": self.instance.to_json(),
            "witness": self.witness.to_json(),
        }


def first_kind_certificate(inst: Instance, witness: OperatorAssignment) -> GapCertificate:
    value, argmax = solve_brute(inst)
    if value >= 1:
        raise VerificationError("instance is Boolean satisfiable; there is no gap", code="not_a_gap")
    report = validate_assignment(witness, inst)
    if not report.ok:
        raise VerificationError("witness is not a valid operator assignment", code="invalid_assignment")
    if operator_value(witness, inst) != 1:
        raise VerificationError("witness does not satisfy every constraint", code="not_satisfying")
    return GapCertificate(inst, value, argmax, witness.restrict(inst.variables), witness.dim)


def mermin_certificate() -> GapCertificate:
    return first_kind_certificate(mermin_instance(), mermin_witness())


def transport_gap(defs: PpDefinitionSet, inst: Instance | None = None,
                  witness: OperatorAssignment | None = None) -> GapCertificate:
    """Carry a first-kind gap through the gadget reduction J and re-certify it."""
    inst = inst or mermin_instance()
    witness = witness or mermin_witness()
    first_kind_certificate(inst, witness)
    out = build_J(inst, defs)
    g = lift(witness, inst, defs, out)
    return first_kind_certificate(out.instance, g)


__all__ = [
    "PAULI", "pauli", "MERMIN_VARS", "MERMIN_LANGUAGE", "MERMIN_SQUARE", "mermin_instance",
    "mermin_witness", "mermin_rows", "ji_formula", "ji_definitions", "t_instance",
    "ONE_IN_LANGUAGE", "clause_formula", "all_clause_signs", "clause_language",
    "threesat_definitions", "EVEN4", "lin_definitions_even4", "LIN3", "SAT3",
    "pad_T_constraints", "pad_witness", "GapCertificate", "first_kind_certificate",
    "mermin_certificate", "transport_gap",
]
