"""Kronecker-product closure operations on operator assignments.

A Boolean operation f of arity m acts on Hermitian involutions by
F(X_1..X_m) = sum_S f^(S) X_1^{S(1)} (x) ... (x) X_m^{S(m)}, where X^0 is the
identity of that factor.
"""

from __future__ import annotations

from typing import Mapping, Sequence

from .classify import BooleanOperation, PpFormula, is_invariant, xor3
from .errors import CapExceeded, InputError, PredicateError, VerificationError
from .fourier import MultilinearPoly, transform
from .gallery import mermin_rows
from .matrix import Matrix, OperatorAssignment, identity, kron, mat_product, operator_value, scalar_matrix, zero
from .model import EVEN3, BooleanRelation, ConstraintLanguage, Instance, is_const

MAX_DIM = 4096


def operation_poly(f: BooleanOperation) -> MultilinearPoly:
    return transform(f.table, f.arity)


def apply_closure(f: BooleanOperation, ops: Sequence[Matrix]) -> Matrix:
    if len(ops) != f.arity:
        raise InputError(f"operation has arity {f.arity}, got {len(ops)} operators", code="arity_mismatch")
    out_dim = 1
    for m in ops:
        out_dim *= m.dim
    if out_dim > MAX_DIM:
        raise CapExceeded(f"Kronecker output dimension {out_dim} exceeds {MAX_DIM}")
    for i, m in enumerate(ops):
        if not m.is_involution():
            raise PredicateError(f"input {i + 1} is not an involution", code="non_involution")
    poly = operation_poly(f)
    eyes = [identity(m.dim) for m in ops]
    total = zero(out_dim)
    for mask, c in poly.coeffs.items():
        factors = [ops[i] if mask >> i & 1 else eyes[i] for i in range(f.arity)]
        total = total + kron(*factors).scalar_mul(c)
    return total


def _fully_commuting(f: OperatorAssignment, names: Sequence[str]) -> bool:
    for a in range(len(names)):
        for b in range(a + 1, len(names)):
            if not f[names[a]].commutes(f[names[b]]):
                return False
    return True


def _relation_instance(rel: BooleanRelation, names: Sequence[str]) -> Instance:
    return Instance({"R": rel}, names, [("R", tuple(names))])


def apply_closure_assignments(f: BooleanOperation, assignments: Sequence[OperatorAssignment],
                              rel: BooleanRelation | None = None,
                              names: Sequence[str] | None = None) -> OperatorAssignment:
    """Componentwise closure of m fully commuting r-variable assignments.

    When ``rel`` is given each input must satisfy P_rel = -I on ``names`` and
    the output is checked to do so as well.
    """
    if len(assignments) != f.arity:
        raise InputError(f"operation has arity {f.arity}, got {len(assignments)} assignments",
                         code="arity_mismatch")
    if names is None:
        names = list(assignments[0].assign)
    names = list(names)
    for k, a in enumerate(assignments):
        if set(a.assign) != set(names):
            raise InputError(f"assignment {k} has variables {sorted(a.assign)}, expected {sorted(names)}",
                             code="variable_mismatch")
        if not _fully_commuting(a, names):
            raise PredicateError(f"assignment {k} is not fully commuting", code="non_commuting")
        if rel is not None and operator_value(a, _relation_instance(rel, names)) != 1:
            raise VerificationError(f"assignment {k} does not satisfy the relation", code="not_satisfying")
    out = OperatorAssignment(
        mat_dim(assignments),
        {v: apply_closure(f, [a[v] for a in assignments]) for v in names},
    )
    if not _fully_commuting(out, names):
        raise AssertionError("closure output is not fully commuting")
    if rel is not None and operator_value(out, _relation_instance(rel, names)) != 1:
        raise AssertionError("closure output does not satisfy the relation")
    return out


def mat_dim(assignments: Sequence[OperatorAssignment]) -> int:
    d = 1
    for a in assignments:
        d *= a.dim
    return d


def ordinary_product_counterexample() -> dict:
    """Column products of the magic-square witness break even3; Kronecker rows do not."""
    rows = mermin_rows()
    d = rows[0][0].dim
    eye, minus = identity(d), scalar_matrix(-1, d)
    for r in rows:
        if not mat_product(r).is_identity():
            raise AssertionError("a row of the witness does not multiply to I")
    cols = [mat_product([rows[i][j] for i in range(3)]) for j in range(3)]
    expected = [eye, eye, minus]
    if cols != expected:
        raise AssertionError("column products differ from I, I, -I")
    triple = mat_product(cols)
    if triple != minus:
        raise AssertionError("D1 D2 D3 should be -I")
    names = ["x1", "x2", "x3"]
    row_assignments = [OperatorAssignment(d, dict(zip(names, r))) for r in rows]
    kron_out = apply_closure_assignments(xor3, row_assignments, EVEN3, names)
    kprod = mat_product([kron_out[v] for v in names])
    if not kprod.is_identity():
        raise AssertionError("Kronecker composition should multiply to I")
    return {
        "column_products": ["I", "I", "-I"],
        "ordinary_product_D1D2D3": "-I",
        "ordinary_satisfies_even3": False,
        "kronecker_dim": kron_out.dim,
        "kronecker_product": "I",
        "kronecker_satisfies_even3": True,
    }


def ppstar_collapse_demo(rel: BooleanRelation, lang: ConstraintLanguage,
                         phi: PpFormula | None = None,
                         witnesses: Mapping[tuple, OperatorAssignment] | None = None,
                         operations: Sequence[BooleanOperation] = ()) -> dict:
    """Check pp*-membership witnesses and report invariance under closure operations.

    For each tuple a of ``rel`` the witness must satisfy the instance obtained
    from phi by substituting a for the free variables (bound variables become
    instance variables).  For each operation the report records whether it
    preserves A+ (the language plus both constants) and whether it preserves
    rel; an operation preserving A+ but not rel rules out pp*-definability.
    """
    lang = ConstraintLanguage(lang)
    checked = []
    if phi is not None:
        if phi.arity != rel.arity:
            raise InputError("formula arity differs from the relation's", code="arity_mismatch")
        witnesses = witnesses or {}
        for a in rel.tuples:
            if a not in witnesses:
                raise InputError(f"no witness for tuple {a}", code="missing_witness")
            sub = dict(zip(phi.free, a))
            cons = [(r, tuple(e if is_const(e) else sub.get(e, e) for e in s)) for r, s in phi.atoms]
            inst = Instance(lang, phi.bound, cons)
            value = operator_value(witnesses[a], inst)
            if value != 1:
                raise VerificationError(f"witness for {a} does not satisfy its instance", code="invalid_witness")
            checked.append({"tuple": list(a), "dim": witnesses[a].dim, "value": "1/1"})
    plus = lang.union({"__pos": BooleanRelation(1, [(1,)]), "__neg": BooleanRelation(1, [(-1,)])})
    ops = []
    consistent = True
    for f in operations:
        pres_a = all(is_invariant(r, f) for r in plus.values())
        pres_r = is_invariant(rel, f)
        if pres_a and not pres_r:
            consistent = False
        ops.append({"operation": f.name or f"arity-{f.arity}", "preserves_A_plus": pres_a,
                    "preserves_R": pres_r})
    return {
        "witnessed_tuples": checked,
        "operations": ops,
        "pp_star_definable_possible": consistent,
    }


__all__ = [
    "MAX_DIM", "operation_poly", "apply_closure", "apply_closure_assignments",
    "ordinary_product_counterexample", "ppstar_collapse_demo",
]
