import itertools
import random
import time
from fractions import Fraction

import pytest
from helpers import commuting_pauli_words, pauli_matrix, random_pauli_word, random_satisfying_assignment

from opsat.classify import (
    BooleanOperation, PpFormula, and2, first_witness, is_invariant, maj3, projection, xor3,
)
from opsat.closure import (
    apply_closure, apply_closure_assignments, ordinary_product_counterexample, ppstar_collapse_demo,
)
from opsat.errors import CapExceeded, InputError, PredicateError, VerificationError
from opsat.gallery import LIN3, PAULI, mermin_rows
from opsat.matrix import Matrix, OperatorAssignment, identity, kron, mat_product, scalar_matrix
from opsat.model import EVEN3, ODD3, OR2, R13, T, Instance, clause_relation, cube

I2, X, Z = PAULI["I"], PAULI["X"], PAULI["Z"]


def test_xor3_is_triple_kronecker_product():
    rng = random.Random(2)
    for _ in range(10):
        ops = [pauli_matrix(random_pauli_word(rng, rng.randint(1, 2))) for _ in range(3)]
        assert apply_closure(xor3, ops) == kron(*ops)


def test_and2_expansion():
    h = Fraction(1, 2)
    expected = (kron(I2, I2) + kron(X, I2) + kron(I2, Z) - kron(X, Z)).scalar_mul(h)
    out = apply_closure(and2, [X, Z])
    assert out == expected
    assert out.is_involution() and out.is_hermitian()


def test_scalar_embedding_exhaustive():
    start = time.perf_counter()
    for m in (1, 2, 3):
        points = list(cube(m))
        for outs in itertools.product((1, -1), repeat=len(points)):
            f = BooleanOperation(m, dict(zip(points, outs)))
            for a in points:
                got = apply_closure(f, [scalar_matrix(x, 1) for x in a])
                assert got == scalar_matrix(f(*a), 1)
    assert time.perf_counter() - start < 10


def test_scalar_embedding_at_dimension_two():
    rng = random.Random(0)
    for m in (1, 2, 3):
        points = list(cube(m))
        for _ in range(20):
            f = BooleanOperation(m, {p: rng.choice((1, -1)) for p in points})
            for a in points:
                got = apply_closure(f, [scalar_matrix(x, 2) for x in a])
                assert got == scalar_matrix(f(*a), 2 ** m)


def test_operation_laws_on_pauli_inputs():
    rng = random.Random(5)
    ops_pool = [and2, maj3, xor3, projection(2, 2)]
    for _ in range(12):
        f = rng.choice(ops_pool)
        pairs = []
        for _ in range(f.arity):
            n = rng.randint(1, 2)
            w = commuting_pauli_words(rng, n, 2)
            while len(w) < 2:
                w.append("I" * n)
            pairs.append([pauli_matrix(x).scalar_mul(rng.choice((1, -1))) for x in w])
        a = apply_closure(f, [p[0] for p in pairs])
        b = apply_closure(f, [p[1] for p in pairs])
        assert a.is_hermitian() and a.is_involution()
        assert b.is_hermitian() and b.is_involution()
        assert a.commutes(b)


@pytest.mark.parametrize("rel", [EVEN3, ODD3, clause_relation((1, 1, 1)), clause_relation((1, -1)),
                                 clause_relation((-1, -1, 1))], ids=str)
def test_preservation_of_relations(rel):
    rng = random.Random(rel.arity * 31 + len(rel))
    names = [f"x{i + 1}" for i in range(rel.arity)]
    inst = Instance({"R": rel}, names, [("R", names)])
    for f in (xor3, maj3, and2):
        if not is_invariant(rel, f):
            continue
        inputs = [random_satisfying_assignment(rng, inst, rng.randint(0, 1)) for _ in range(f.arity)]
        out = apply_closure_assignments(f, inputs, rel, names)
        assert out.dim == 2 ** sum(1 for a in inputs if a.dim == 2)


def test_identity_projection_leaves_input():
    f = OperatorAssignment(2, {"a": X, "b": X.scalar_mul(-1)})
    assert apply_closure_assignments(projection(1, 1), [f]) == f


def test_dimension_one_reduces_to_boolean_operation():
    rows = [{"a": 1, "b": -1}, {"a": -1, "b": -1}]
    out = apply_closure_assignments(and2, [OperatorAssignment.from_boolean(r) for r in rows])
    assert out == OperatorAssignment.from_boolean({"a": 1, "b": -1})


def test_relation_check_rejects_bad_input():
    bad = OperatorAssignment.from_boolean({"x1": 1, "x2": 1, "x3": -1})
    with pytest.raises(VerificationError):
        apply_closure_assignments(xor3, [bad] * 3, EVEN3, ["x1", "x2", "x3"])


def test_ordinary_product_counterexample():
    rep = ordinary_product_counterexample()
    assert rep["ordinary_product_D1D2D3"] == "-I"
    assert rep["kronecker_dim"] == 64 and rep["kronecker_satisfies_even3"]
    rows = mermin_rows()
    cols = [mat_product([rows[i][j] for i in range(3)]) for j in range(3)]
    assert mat_product(cols) == scalar_matrix(-1, 4)


def test_input_checks():
    with pytest.raises(InputError):
        apply_closure(xor3, [X, X])
    with pytest.raises(PredicateError):
        apply_closure(and2, [X, Matrix([[1, 0], [0, 0]])])
    big = identity(32)
    with pytest.raises(CapExceeded):
        apply_closure(xor3, [big, big, big])
    commuting_fail = OperatorAssignment(2, {"a": X, "b": Z})
    with pytest.raises(PredicateError):
        apply_closure_assignments(projection(1, 1), [commuting_fail])


def test_ppstar_demo_ji():
    phi = PpFormula(("Z1", "Z2"), ("U1", "U2", "U3", "U4"),
                    [("R13", ("Z1", "U1", "U4")), ("R13", ("Z2", "U2", "U4")), ("R13", ("U1", "U2", "U3"))])
    witnesses = {}
    for a in T.tuples:
        b = first_witness(phi, {"R13": R13}, a)
        witnesses[a] = OperatorAssignment.from_boolean(dict(zip(phi.bound, b)))
    rep = ppstar_collapse_demo(T, {"R13": R13}, phi, witnesses)
    assert len(rep["witnessed_tuples"]) == 4 and rep["pp_star_definable_possible"]


def test_ppstar_demo_or_from_lin():
    rep = ppstar_collapse_demo(OR2, LIN3, operations=[xor3])
    assert rep["operations"] == [{"operation": "xor3", "preserves_A_plus": True, "preserves_R": False}]
    assert not rep["pp_star_definable_possible"]


def test_ppstar_demo_identity_case():
    phi = PpFormula(("x1", "x2", "x3"), (), [("even3", ("x1", "x2", "x3"))])
    witnesses = {a: OperatorAssignment(1, {}) for a in EVEN3.tuples}
    rep = ppstar_collapse_demo(EVEN3, {"even3": EVEN3}, phi, witnesses, [xor3])
    assert rep["pp_star_definable_possible"]
