import itertools
from fractions import Fraction

import pytest

from helpers import odd4_definitions

from opsat.classify import pp_defines
from opsat.errors import InputError, VerificationError
from opsat.fourier import clause_poly
from opsat.gallery import (
    EVEN4, LIN3, ONE_IN_LANGUAGE, all_clause_signs, clause_formula, first_kind_certificate,
    lin_definitions_even4, mermin_certificate, mermin_instance, mermin_rows, mermin_witness, pad_T_constraints,
    pad_witness, pauli, t_instance, transport_gap,
)
from opsat.matrix import OperatorAssignment, eval_poly_at, mat_product, operator_value, scalar_matrix
from opsat.model import EVEN3, ODD3, T, Instance, clause_name, clause_relation, parity_relation
from opsat.solve import check_parity_certificate, instance_parity, solve_brute, solve_gf2

def test_mermin_instance_shape():
    inst = mermin_instance()
    assert len(inst.variables) == 9 and inst.m == 6
    assert solve_brute(inst)[0] == Fraction(5, 6)
    system, _ = instance_parity(inst)
    res = solve_gf2(system)
    assert not res.sat and sorted(res.certificate) == list(range(6))
    assert check_parity_certificate(system, res.certificate)


def test_mermin_witness_algebra():
    f = mermin_witness()
    assert f.dim == 4
    for m in f.assign.values():
        assert m.is_hermitian() and m.is_involution()
    rows = mermin_rows()
    eye = scalar_matrix(1, 4)
    assert [mat_product(r) for r in rows] == [eye, eye, eye]
    cols = [mat_product([rows[i][j] for i in range(3)]) for j in range(3)]
    assert cols == [eye, eye, scalar_matrix(-1, 4)]
    pairs = 0
    for rel, scope in mermin_instance().constraints:
        for u, v in itertools.combinations(scope, 2):
            assert f[u].commutes(f[v])
            pairs += 1
    assert pairs == 18
    assert operator_value(f, mermin_instance()) == 1


def test_mermin_certificate():
    cert = mermin_certificate()
    assert cert.boolean_max == Fraction(5, 6) and cert.witness_dim == 4
    doc = cert.to_json()
    assert doc["operator_value"] == "1/1" and doc["boolean_max"] == "5/6"


def test_certificate_rejects_satisfiable_instance():
    inst = Instance({"even3": EVEN3}, ["a", "b", "c"], [("even3", ("a", "b", "c"))])
    f = OperatorAssignment.from_boolean({"a": 1, "b": 1, "c": 1})
    with pytest.raises(VerificationError):
        first_kind_certificate(inst, f)


def test_transport_through_even4():
    cert = transport_gap(lin_definitions_even4())
    assert set(cert.instance.language) == {"even4"}
    assert cert.boolean_max < 1 and cert.witness_dim == 4
    assert operator_value(cert.witness, cert.instance) == 1
    assert EVEN4 == parity_relation(4, 1)


def test_transport_through_user_language():
    cert = transport_gap(odd4_definitions())
    assert set(cert.instance.language) == {"odd4"}
    assert cert.boolean_max < 1 and operator_value(cert.witness, cert.instance) == 1


def test_pad_3lin():
    inst = t_instance()
    padded = pad_T_constraints(inst, "3LIN")
    assert padded.m == 1
    rel, scope = padded.constraints[0]
    assert padded.language[rel] == ODD3 and scope == ("Z1", "Z2", "P0__Y")
    f = OperatorAssignment(4, {"Z1": pauli("ZI"), "Z2": pauli("IZ")})
    g = pad_witness(f, inst, "3LIN")
    assert g["P0__Y"] == -pauli("ZZ")
    assert operator_value(g, padded) == 1
    assert g.restrict(inst.variables) == f


def test_pad_3sat():
    inst = Instance({"T": T, "c": clause_relation((1, 1, 1))}, ["a", "b", "c"],
                    [("T", ("a", "b")), ("c", ("a", "b", "c"))])
    padded = pad_T_constraints(inst, "3SAT")
    assert padded.m == 2 and padded.constraints[0].scope == ("a", "b", "P0__Y")
    f = OperatorAssignment(4, {"a": pauli("ZI"), "b": pauli("IZ"), "c": scalar_matrix(-1, 4)})
    g = pad_witness(f, inst, "3SAT")
    assert g["P0__Y"] == scalar_matrix(-1, 4)
    assert operator_value(g, padded) == 1
    # The product term of the clause polynomial vanishes once Y = -I.
    p = clause_poly([(1, 1), (2, 1), (3, 1)])
    assert eval_poly_at(p, [f["a"], f["b"], g["P0__Y"]]) == scalar_matrix(-1, 4)


def test_pad_errors():
    with pytest.raises(InputError):
        pad_T_constraints(t_instance(), "2SAT")
    bad = Instance({"T": T, "e4": EVEN4}, ["a", "b", "c", "d"], [("e4", ("a", "b", "c", "d"))])
    with pytest.raises(InputError):
        pad_T_constraints(bad, "3LIN")
    assert set(LIN3) == {"even3", "odd3"}


@pytest.mark.parametrize("signs", list(all_clause_signs()), ids=clause_name)
def test_clause_formulas_define_clauses(signs):
    phi = clause_formula(signs)
    assert pp_defines(phi, ONE_IN_LANGUAGE) == clause_relation(signs)
    for _, scope in phi.atoms:
        assert len(set(scope)) == len(scope) and all(isinstance(x, str) for x in scope)
