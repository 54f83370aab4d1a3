import itertools
import random
from fractions import Fraction

import networkx as nx
import pytest
from helpers import commuting_pauli_words, pauli_matrix, random_graph, random_hermitian, random_unitary

from opsat.contextuality import (
    ONE_IN_THREE_POLY, RESOLUTION_POLY, Hypergraph, comm, find_d1_model, involution_projector, ji_gadget_check, ji_identities, ji_residuals,
    ji_sums, labelling_model, model_to_involutions, one_in_three_holds, parse_hypergraph,
    projector_involution, resolution_holds, scenario_model, threesat_reduction, threesat_to_scenario,
    two_allows_decide, verify_quantum_model,
)
from opsat.errors import CapExceeded, InputError
from opsat.gadget import build_J, lift
from opsat.gallery import PAULI, ji_definitions, pauli, t_instance
from opsat.matrix import Matrix, OperatorAssignment, diag, identity, zero
from opsat.model import ODD3, Instance, clause_name, clause_relation, cube, dumps
from opsat.solve import check_2sat_certificate, solve_brute

I2, X, Z = PAULI["I"], PAULI["X"], PAULI["Z"]
H = Fraction(1, 2)


def test_single_edge_models():
    h = Hypergraph(["u", "v"], [("u", "v")])
    good = OperatorAssignment(1, {"u": Matrix([[1]]), "v": Matrix([[0]])})
    assert verify_quantum_model(h, good).ok
    half = OperatorAssignment(1, {"u": Matrix([[H]]), "v": Matrix([[H]])})
    rep = verify_quantum_model(h, half)
    assert not rep.ok and rep.non_idempotent == ["u", "v"] and rep.unresolved_edges == []


def test_model_report_lists_bad_edges():
    h = Hypergraph(["u", "v"], [("u", "v")])
    p = OperatorAssignment(1, {"u": Matrix([[1]]), "v": Matrix([[1]])})
    assert verify_quantum_model(h, p).unresolved_edges == [0]


def test_dictionary():
    assert involution_projector(I2) == zero(2)
    assert involution_projector(Z) == diag([0, 1])
    rng = random.Random(3)
    for _ in range(10):
        w = commuting_pauli_words(rng, 2, 1)[0]
        a = random_unitary(rng, 2) @ pauli_matrix(w) @ random_unitary(rng, 2).H
        if not a.is_involution():
            continue
        assert projector_involution(involution_projector(a)) == a


def test_dictionary_soundness():
    h = Hypergraph(["a", "b", "c", "d"], [("a", "b"), ("b", "c", "d")])
    p = OperatorAssignment(2, {"a": diag([1, 0]), "b": diag([0, 1]), "c": diag([1, 0]), "d": zero(2)})
    assert verify_quantum_model(h, p).ok
    inv = model_to_involutions(p)
    for e in h.edges:
        for u, v in itertools.combinations(e, 2):
            assert inv[u].commutes(inv[v])
        total = zero(2)
        for v in e:
            total = total + involution_projector(inv[v])
        assert total == identity(2)


def test_one_in_three_vs_resolution_polynomials():
    assert ONE_IN_THREE_POLY != RESOLUTION_POLY
    rng = random.Random(11)
    for _ in range(40):
        n = rng.randint(1, 2)
        words = commuting_pauli_words(rng, n, 3)
        while len(words) < 3:
            words.append("I" * n)
        u = random_unitary(rng, n)
        ops = [u @ pauli_matrix(w).scalar_mul(rng.choice((1, -1))) @ u.H for w in words]
        assert one_in_three_holds(ops) == resolution_holds(ops)
    for a in cube(3):
        ops = [Matrix([[x]]) for x in a]
        assert one_in_three_holds(ops) == resolution_holds(ops) == (a.count(-1) == 1)


# ---------------------------------------------------------------- Ji gadget

def test_ji_zero_examples():
    z, eye = zero(2), identity(2)
    # Q3 = I alone leaves P1 + Q1 + Q4 = 0, so the first two sums fail.
    rep = ji_gadget_check(z, z, z, z, eye, z)
    assert rep["equations"] == [False, False, True] and rep["commute"]
    rep = ji_gadget_check(z, z, z, z, eye, eye)
    assert rep["equations_hold"] and rep["commute"]


def ji_projectors(f: OperatorAssignment) -> list[Matrix]:
    out = build_J(t_instance(), ji_definitions())
    g = lift(f, t_instance(), ji_definitions(), out)
    names = ["Z1", "Z2"] + [f"B0__U{k}" for k in (1, 2, 3, 4)]
    return [involution_projector(g[v]) for v in names]


def test_ji_lift_gives_equations():
    mats = ji_projectors(OperatorAssignment(4, {"Z1": pauli("ZI"), "Z2": pauli("IZ")}))
    rep = ji_gadget_check(*mats)
    assert rep["equations_hold"] and rep["commute"] and all(rep["identities"])


def test_ji_equations_fail_for_non_commuting_pair():
    rng = random.Random(5)
    for _ in range(10):
        p1 = involution_projector(X)
        p2 = involution_projector(Z)
        qs = [involution_projector(pauli_matrix(rng.choice("IXYZ")).scalar_mul(rng.choice((1, -1))))
              for _ in range(4)]
        rep = ji_gadget_check(p1, p2, *qs)
        assert not rep["commute"] and not rep["equations_hold"]


def test_ji_residuals_are_exact_and_intra_equation():
    """lhs - rhs of each printed identity equals a sum of commutators inside one sum equation."""
    rng = random.Random(17)
    for _ in range(20):
        mats = [random_hermitian(rng, 3) for _ in range(6)]
        pairs = ji_identities(*mats)
        for (lhs, rhs), res in zip(pairs, ji_residuals(*mats)):
            assert lhs - rhs == res
        p1, p2, q1, q2, q3, q4 = mats
        total = pairs[0][1] + pairs[1][1] + pairs[2][1]
        assert total == comm(p1, p2)


def test_ji_printed_identities_need_the_equations():
    """The printed forms are not free identities: a generic sextuple violates each."""
    rng = random.Random(23)
    mats = [random_hermitian(rng, 3) for _ in range(6)]
    assert not any(lhs == rhs for lhs, rhs in ji_identities(*mats))


def test_ji_sums_shape():
    z, eye = zero(2), identity(2)
    assert ji_sums(eye, eye, z, z, eye, z) == [True, True, True]


# ---------------------------------------------------------------- 3SAT scenarios

def cnf(clauses, variables=("x1", "x2", "x3")) -> Instance:
    lang = {clause_name(s): clause_relation(s) for s, _ in clauses}
    return Instance(lang, variables, [(clause_name(s), scope) for s, scope in clauses])


def test_empty_cnf_scenario():
    h = threesat_to_scenario(Instance({}, ["x1"]))
    assert h.vertices == () and h.edges == ()
    assert find_d1_model(h) == {}


def test_single_clause_scenario():
    red = threesat_reduction(cnf([((1, 1, 1), ("x1", "x2", "x3"))]))
    h = red.hypergraph
    assert set(red.canonical.variables) <= set(red.jhat.instance.variables)
    assert len(red.gadgets) == 36
    for z1, z2, us in red.gadgets:
        assert len(us) == 4
        assert [e for e in h.edges if set(e) & set(us)] == [(z1, us[0], us[3]), (z2, us[1], us[3]),
                                                          (us[0], us[1], us[2])]
    assert len(h.edges) == 3 + 3 * 36 + 2


def test_sat_cnf_gives_model():
    inst = cnf([((1, 1, 1), ("x1", "x2", "x3")), ((-1, 1), ("x1", "x3"))])
    red = threesat_reduction(inst)
    _, w = solve_brute(inst)
    model = scenario_model(red, OperatorAssignment.from_boolean(w))
    assert verify_quantum_model(red.hypergraph, model).ok
    assert find_d1_model(red.hypergraph) is not None


def test_scenario_model_at_dimension_two():
    inst = cnf([((1, 1), ("x1", "x2"))], variables=("x1", "x2"))
    red = threesat_reduction(inst)
    f = OperatorAssignment(2, {"x1": diag([-1, 1]), "x2": diag([1, -1])})
    model = scenario_model(red, f)
    assert model.dim == 2 and verify_quantum_model(red.hypergraph, model).ok


def test_unsat_cnf_has_no_d1_model():
    inst = cnf([((1,), ("x1",)), ((-1,), ("x1",))], variables=("x1",))
    assert find_d1_model(threesat_to_scenario(inst)) is None


def test_scenario_rejects_bad_cnf():
    with pytest.raises(InputError):
        threesat_to_scenario(Instance({"o": ODD3}, ["a", "b", "c"], [("o", ("a", "b", "c"))]))
    with pytest.raises(InputError):
        threesat_to_scenario(cnf([((1, 1), ("x1", "x1"))]))
    with pytest.raises(InputError):
        threesat_to_scenario(Instance({"c": clause_relation((1, 1))}, ["x"], [("c", ("x", 1))]))


def test_d1_search_cap():
    h = Hypergraph([f"v{i}" for i in range(10)], [(f"v{i}",) for i in range(10)])
    with pytest.raises(CapExceeded):
        find_d1_model(h, cap=5)


def test_sampled_cnfs_agree_with_brute_force():
    rng = random.Random(99)
    variables = ("x1", "x2", "x3")
    for _ in range(25):
        clauses = []
        for _ in range(rng.randint(0, 3)):
            k = rng.randint(1, 3)
            scope = tuple(sorted(rng.sample(variables, k)))
            clauses.append((tuple(rng.choice((1, -1)) for _ in range(k)), scope))
        inst = cnf(clauses)
        sat = solve_brute(inst)[0] == 1
        labels = find_d1_model(threesat_to_scenario(inst))
        assert (labels is not None) == sat
        if labels is not None:
            h = threesat_to_scenario(inst)
            assert verify_quantum_model(h, labelling_model(h, labels)).ok


# ---------------------------------------------------------------- 2-ALLOWS-QUANTUM

def test_two_allows_examples():
    res = two_allows_decide(Hypergraph(["u", "v"], [("u", "v")]))
    assert res.allowed
    assert res.model["u"] + res.model["v"] == Matrix([[1]])
    tri = Hypergraph(["a", "b", "c"], [("a", "b"), ("b", "c"), ("a", "c")])
    res = two_allows_decide(tri)
    assert not res.allowed and check_2sat_certificate(res.clauses, res.certificate)
    square = Hypergraph(["a", "b", "c", "d"], [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])
    assert two_allows_decide(square).allowed


def test_two_allows_singletons():
    h = Hypergraph(["a", "b"], [("a",), ("a", "b")])
    res = two_allows_decide(h)
    assert res.allowed and res.model["a"] == Matrix([[1]]) and res.model["b"] == Matrix([[0]])
    h = Hypergraph(["a", "b"], [("a",), ("b",), ("a", "b")])
    assert not two_allows_decide(h).allowed


def test_two_allows_matches_bipartiteness():
    rng = random.Random(50)
    for _ in range(50):
        vs, edges = random_graph(rng)
        covered = [v for v in vs if any(v in e for e in edges)]
        g = nx.Graph()
        g.add_nodes_from(covered)
        g.add_edges_from(edges)
        h = Hypergraph(covered, edges)
        assert two_allows_decide(h).allowed == nx.is_bipartite(g)


def test_two_allows_rejects_big_edges():
    with pytest.raises(InputError):
        two_allows_decide(Hypergraph(["a", "b", "c"], [("a", "b", "c")]))


def test_hypergraph_validation_and_json():
    with pytest.raises(InputError):
        Hypergraph(["a", "b"], [("a",)])
    with pytest.raises(InputError):
        Hypergraph(["a"], [("a", "z")])
    h = Hypergraph(["a", "b"], [("a", "b")])
    assert parse_hypergraph(dumps(h.to_json())) == h
