"""Random generators shared by the test modules."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from opsat.classify import PpFormula
from opsat.gadget import PpDefinitionSet
from opsat.gallery import MERMIN_LANGUAGE, PAULI
from opsat.matrix import G, Matrix, OperatorAssignment, diag, kron
from opsat.model import BooleanRelation, Instance, boolean_value, cube, parity_relation

PAULI_NAMES = "IXYZ"


def clause_models(arity: int, clauses) -> BooleanRelation:
    """Relation of the tuples satisfying clauses over positions (lit = (pos, sign))."""
    return BooleanRelation(arity, [t for t in cube(arity)
                                   if all(any(t[p] == -s for p, s in c) for c in clauses)])


def random_clause(rng: random.Random, arity: int, max_len: int, kind: str | None = None):
    while True:
        size = rng.randint(1, min(max_len, arity))
        pos = rng.sample(range(arity), size)
        signs = [rng.choice((1, -1)) for _ in pos]
        if kind == "horn" and signs.count(1) > 1:
            continue
        if kind == "dualhorn" and signs.count(-1) > 1:
            continue
        return tuple(zip(pos, signs))


def random_relation(rng: random.Random, kind: str, arity: int | None = None,
                    nonempty: bool = True) -> BooleanRelation:
    """Random relation of a tractable class: 2sat, horn, dualhorn or affine."""
    while True:
        k = arity or rng.randint(1, 3)
        if kind == "affine":
            rows = []
            for _ in range(rng.randint(0, k)):
                s = [i for i in range(k) if rng.random() < 0.5]
                rows.append((s, rng.choice((1, -1))))
            rel = BooleanRelation(k, [t for t in cube(k) if all(_prod(t, s) == b for s, b in rows)])
        else:
            max_len = 2 if kind == "2sat" else 3
            cls = [random_clause(rng, k, max_len, None if kind == "2sat" else kind)
                   for _ in range(rng.randint(0, 3))]
            rel = clause_models(k, cls)
        if rel.tuples or not nonempty:
            return rel


def _prod(t, s) -> int:
    p = 1
    for i in s:
        p *= t[i]
    return p


def random_instance(rng: random.Random, kind: str, max_vars: int = 4, max_cons: int = 4,
                    constants: bool = True) -> Instance:
    n = rng.randint(1, max_vars)
    variables = [f"x{i + 1}" for i in range(n)]
    lang = {}
    cons = []
    for j in range(rng.randint(0, max_cons)):
        rel = random_relation(rng, kind, nonempty=rng.random() < 0.9)
        name = f"R{j}"
        lang[name] = rel
        scope = []
        for _ in range(rel.arity):
            if constants and rng.random() < 0.15:
                scope.append(rng.choice((1, -1)))
            else:
                scope.append(rng.choice(variables))
        cons.append((name, scope))
    return Instance(lang, variables, cons)


def random_pauli_word(rng: random.Random, n: int) -> str:
    return "".join(rng.choice(PAULI_NAMES) for _ in range(n))


def pauli_matrix(word: str) -> Matrix:
    return kron(*(PAULI[c] for c in word))


def commuting_pauli_words(rng: random.Random, n: int, count: int) -> list[str]:
    """Pairwise commuting Pauli words on n qubits (signs dropped)."""
    out: list[str] = []
    tries = 0
    while len(out) < count and tries < 1000:
        tries += 1
        w = random_pauli_word(rng, n)
        if all(words_commute(w, u) for u in out):
            out.append(w)
    return out


def words_commute(a: str, b: str) -> bool:
    anti = sum(1 for x, y in zip(a, b) if x != "I" and y != "I" and x != y)
    return anti % 2 == 0


def random_gr(rng: random.Random, lo: int = -3, hi: int = 3, complex_: bool = True) -> G:
    return G(rng.randint(lo, hi), rng.randint(lo, hi) if complex_ else 0)


def random_matrix(rng: random.Random, d: int, complex_: bool = True) -> Matrix:
    return Matrix([[random_gr(rng, complex_=complex_) for _ in range(d)] for _ in range(d)])


def random_hermitian(rng: random.Random, d: int) -> Matrix:
    rows = [[None] * d for _ in range(d)]
    for i in range(d):
        rows[i][i] = G(rng.randint(-3, 3))
        for j in range(i + 1, d):
            z = random_gr(rng)
            rows[i][j] = z
            rows[j][i] = z.conjugate()
    return Matrix(rows)


def random_invertible(rng: random.Random, d: int) -> Matrix:
    while True:
        m = random_matrix(rng, d)
        try:
            m.inverse()
        except (ZeroDivisionError, ValueError, ArithmeticError):
            continue
        return m


def random_graph(rng: random.Random, max_vertices: int = 10):
    n = rng.randint(1, max_vertices)
    vs = [f"v{i}" for i in range(n)]
    p = rng.choice((0.2, 0.35, 0.5))
    edges = [(a, b) for a, b in itertools.combinations(vs, 2) if rng.random() < p]
    return vs, edges


# Unitaries with rational entries, for conjugating diagonal assignments.
_R = Matrix([[Fraction(3, 5), Fraction(4, 5)], [Fraction(4, 5), Fraction(-3, 5)]])
_U = Matrix([[Fraction(3, 5), G(0, Fraction(4, 5))], [G(0, Fraction(4, 5)), Fraction(3, 5)]])


def random_unitary(rng: random.Random, qubits: int) -> Matrix:
    pool = [_R, _U, PAULI["I"], PAULI["X"], PAULI["Y"]]
    return kron(*(rng.choice(pool) for _ in range(qubits)))


def random_satisfying_assignment(rng: random.Random, inst: Instance, qubits: int):
    """Fully commuting assignment of dimension 2^qubits satisfying inst, or None if inst is UNSAT.

    Each eigenvector carries a Boolean satisfying assignment; the common
    eigenbasis is then rotated by a random rational unitary.
    """
    models = [a for a in cube(len(inst.variables))
              if boolean_value(inst, dict(zip(inst.variables, a))) == 1]
    if not models:
        return None
    d = 1 << qubits
    picks = [rng.choice(models) for _ in range(d)]
    u = random_unitary(rng, qubits) if qubits else None
    ops = {}
    for k, v in enumerate(inst.variables):
        m = diag([p[k] for p in picks])
        ops[v] = u @ m @ u.H if u is not None else m
    return OperatorAssignment(d, ops)


ODD4 = parity_relation(4, -1)


def odd4_definitions() -> PpDefinitionSet:
    """even3 and odd3 from x1 x2 x3 x4 = -1, a language not shipped with the package."""
    even = PpFormula(("x1", "x2", "x3"), ("y",),
                     [("odd4", ("x1", "x2", "y", -1)), ("odd4", ("y", "x3", -1, 1))])
    odd = PpFormula(("x1", "x2", "x3"), ("y",),
                    [("odd4", ("x1", "x2", "y", -1)), ("odd4", ("y", "x3", 1, 1))])
    return PpDefinitionSet(MERMIN_LANGUAGE, {"odd4": ODD4}, {"even3": even, "odd3": odd})
