"""Contextuality scenarios, quantum models and the reductions around them.

A quantum model of a hypergraph assigns a Hermitian idempotent to every
vertex so that the projectors on each edge sum to the identity.  The
dictionary P = (I - A)/2, A = I - 2P links models to operator assignments.
"""

from __future__ import annotations

import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import CapExceeded, InputError, PredicateError, ParseError
from .fourier import MultilinearPoly, indicator_poly
from .gadget import ReductionOutput, build_J, build_J_hat, lift
from .gallery import clause_language, ji_definitions, t_instance, threesat_definitions
from .matrix import Matrix, OperatorAssignment, eval_poly_at, identity, scalar_matrix, zero
from .model import R13, Instance, clause_name, cube, is_const, load_json
from .solve import TwoSatCertificate, solve_2sat

ProjectorAssignment = OperatorAssignment

MAX_SEARCH_VERTICES = 5000


@dataclass(frozen=True)
class Hypergraph:
    vertices: tuple[str, ...]
    edges: tuple[tuple[str, ...], ...]

    def __init__(self, vertices, edges):
        vertices = tuple(vertices)
        edges = tuple(tuple(e) for e in edges)
        vs = set(vertices)
        if len(vs) != len(vertices):
            raise InputError("duplicate vertex", code="invalid_value")
        covered = set()
        for k, e in enumerate(edges):
            if not e:
                raise InputError("edges must be nonempty", code="invalid_value", context=f"edges[{k}]")
            if len(set(e)) != len(e):
                raise InputError("an edge lists a vertex twice", code="invalid_value", context=f"edges[{k}]")
            for v in e:
                if v not in vs:
                    raise InputError(f"edge uses undeclared vertex {v!r}", code="undeclared_variable",
                                     context=f"edges[{k}]")
            covered.update(e)
        if covered != vs:
            raise InputError(f"vertices not covered by any edge: {sorted(vs - covered)}", code="invalid_value")
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", edges)

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "edges": [list(e) for e in self.edges]}


def hypergraph_from_json(doc) -> Hypergraph:
    if not isinstance(doc, dict) or "vertices" not in doc or "edges" not in doc:
        raise ParseError("hypergraph needs 'vertices' and 'edges'", code="malformed", context="$")
    if not isinstance(doc["vertices"], list) or not isinstance(doc["edges"], list):
        raise ParseError("'vertices' and 'edges' must be lists", code="malformed", context="$")
    return Hypergraph(doc["vertices"], doc["edges"])


def parse_hypergraph(text: str) -> Hypergraph:
    return hypergraph_from_json(load_json(text))


# ---------------------------------------------------------------- models

@dataclass
class ModelReport:
    non_hermitian: list[str]
    non_idempotent: list[str]
    unresolved_edges: list[int]

    @property
    def ok(self) -> bool:
        return not (self.non_hermitian or self.non_idempotent or self.unresolved_edges)

    def to_json(self) -> dict:
        return {"valid": self.ok, "non_hermitian": self.non_hermitian,
                "non_idempotent": self.non_idempotent, "unresolved_edges": self.unresolved_edges}


def verify_quantum_model(h: Hypergraph, p: ProjectorAssignment) -> ModelReport:
    missing = [v for v in h.vertices if v not in p]
    if missing:
        raise InputError(f"projector assignment misses vertices {missing}", code="missing_variable")
    herm = [v for v in h.vertices if not p[v].is_hermitian()]
    idem = [v for v in h.vertices if not p[v].is_idempotent()]
    eye = identity(p.dim)
    bad = []
    for k, e in enumerate(h.edges):
        s = zero(p.dim)
        for v in e:
            s = s + p[v]
        if s != eye:
            bad.append(k)
    return ModelReport(herm, idem, bad)


def involution_projector(a: Matrix) -> Matrix:
    """(I - A)/2 for an involution A."""
    if not a.is_involution():
        raise PredicateError("input is not an involution", code="non_involution")
    return (identity(a.dim) - a).scalar_mul(Fraction(1, 2))


def projector_involution(p: Matrix) -> Matrix:
    """I - 2P for an idempotent P."""
    if not p.is_idempotent():
        raise PredicateError("input is not idempotent", code="non_idempotent")
    return identity(p.dim) - p.scalar_mul(2)


def model_to_involutions(p: ProjectorAssignment) -> OperatorAssignment:
    return OperatorAssignment(p.dim, {v: projector_involution(m) for v, m in p.assign.items()})


# ---------------------------------------------------------------- 1-in-3 versus resolution of identity

ONE_IN_THREE_POLY = indicator_poly(R13)
RESOLUTION_POLY = MultilinearPoly(3, {0: Fraction(1, 2), 1: Fraction(-1, 2), 2: Fraction(-1, 2), 4: Fraction(-1, 2)})


def one_in_three_holds(ops: Sequence[Matrix]) -> bool:
    """P_R13(A1, A2, A3) == -I."""
    return eval_poly_at(ONE_IN_THREE_POLY, ops) == scalar_matrix(-1, ops[0].dim)


def resolution_holds(ops: Sequence[Matrix]) -> bool:
    """(I - A1)/2 + (I - A2)/2 + (I - A3)/2 == I, i.e. RESOLUTION_POLY(A) == 0."""
    return eval_poly_at(RESOLUTION_POLY, ops).is_zero()


# ---------------------------------------------------------------- Ji's commutativity gadget

def comm(x: Matrix, y: Matrix) -> Matrix:
    return x @ y - y @ x


def ji_sums(p1, p2, q1, q2, q3, q4) -> list[bool]:
    eye = identity(p1.dim)
    return [p1 + q1 + q4 == eye, p2 + q2 + q4 == eye, q1 + q2 + q3 == eye]


def ji_identities(p1, p2, q1, q2, q3, q4) -> list[tuple[Matrix, Matrix]]:
    """Both sides of the three commutator identities, each computed independently.

    [P1+Q1+Q4-I, -P1+Q1+Q3] = [P1,Q3] + [Q4,Q3]
    [P2+Q2+Q4-I, -P1]       = [P1,P2] + [P1,Q2]
    [Q1+Q2+Q3-I, P1+Q4]     = [Q2,P1] + [Q3,P1] + [Q3,Q4]
    """
    eye = identity(p1.dim)
    return [
        (comm(p1 + q1 + q4 - eye, -p1 + q1 + q3), comm(p1, q3) + comm(q4, q3)),
        (comm(p2 + q2 + q4 - eye, -p1), comm(p1, p2) + comm(p1, q2)),
        (comm(q1 + q2 + q3 - eye, p1 + q4), comm(q2, p1) + comm(q3, p1) + comm(q3, q4)),
    ]


def ji_residuals(p1, p2, q1, q2, q3, q4) -> list[Matrix]:
    """lhs - rhs of each identity written through commutators inside one sum equation.

    The three remainders only involve pairs drawn from {P1,Q1,Q4},
    {P2,Q2,Q4} or {Q1,Q2,Q3}, so they vanish once each equation's
    projectors commute, which the equations themselves force.
    """
    return [
        comm(p1, q1).scalar_mul(2) + comm(q1, q3) + comm(p1, q4) + comm(q4, q1),
        comm(p1, q4),
        comm(q1, p1) + comm(q1, q4) + comm(q2, q4),
    ]


def ji_gadget_check(p1, p2, q1, q2, q3, q4) -> dict:
    mats = [p1, p2, q1, q2, q3, q4]
    if len({m.dim for m in mats}) != 1:
        raise PredicateError("projectors have different dimensions", code="dim_mismatch")
    for name, m in zip(("P1", "P2", "Q1", "Q2", "Q3", "Q4"), mats):
        if not m.is_hermitian() or not m.is_idempotent():
            raise PredicateError(f"{name} is not a Hermitian idempotent", code="not_projector")
    sums = ji_sums(*mats)
    pairs = ji_identities(*mats)
    identities = [lhs == rhs for lhs, rhs in pairs]
    rhs_total = pairs[0][1] + pairs[1][1] + pairs[2][1]
    c12 = comm(p1, p2)
    report = {
        "equations": sums,
        "equations_hold": all(sums),
        "identities": identities,
        "rhs_sum_is_commutator": rhs_total == c12,
        "commute": c12.is_zero(),
    }
    if all(sums):
        if not all(lhs.is_zero() for lhs, _ in pairs):
            raise AssertionError("sum equations hold but a left-hand side is nonzero")
        if not all(identities) or not report["commute"]:
            raise AssertionError("sum equations hold but P1, P2 do not commute")
    return report


# ---------------------------------------------------------------- 3SAT to scenarios

RESERVED = re.compile(r"(B|T)\d+__")


def _clause_signs(rel) -> tuple[int, ...] | None:
    missing = [t for t in cube(rel.arity) if t not in rel]
    if rel.arity <= 3 and len(missing) == 1:
        return missing[0]
    return None


@dataclass(frozen=True)
class ScenarioReduction:
    source: Instance
    canonical: Instance
    jhat: ReductionOutput
    hypergraph: Hypergraph
    gadgets: tuple[tuple[str, str, tuple[str, str, str, str]], ...]


def _canonical_cnf(cnf: Instance) -> Instance:
    lang = clause_language()
    cons = []
    for i, (rel_name, scope) in enumerate(cnf.constraints):
        signs = _clause_signs(cnf.language[rel_name])
        if signs is None:
            raise InputError(f"relation {rel_name!r} is not a clause relation on at most 3 literals",
                             code="not_clause", context=f"constraints[{i}]")
        if any(is_const(e) for e in scope) or len(set(scope)) != len(scope):
            raise InputError("clause scopes must list distinct variables without constants",
                             code="not_clause", context=f"constraints[{i}]")
        cons.append((clause_name(signs), scope))
    for v in cnf.variables:
        if RESERVED.match(v):
            raise InputError(f"variable {v!r} uses a reserved prefix", code="reserved_name")
    return Instance(lang, cnf.variables, cons)


def threesat_reduction(cnf: Instance) -> ScenarioReduction:
    canon = _canonical_cnf(cnf)
    defs = threesat_definitions()
    out = build_J_hat(canon, defs)
    jhat = out.instance
    edge_of = {"R13": 3, "R12": 2, "R11": 1}
    edges: list[tuple[str, ...]] = []
    gadgets = []
    for k, (rel, scope) in enumerate(jhat.constraints):
        if rel == out.t_name:
            u = tuple(f"T{k}__U{i}" for i in (1, 2, 3, 4))
            z1, z2 = scope
            edges += [(z1, u[0], u[3]), (z2, u[1], u[3]), (u[0], u[1], u[2])]
            gadgets.append((z1, z2, u))
        elif rel in edge_of:
            edges.append(tuple(scope))
        else:
            raise AssertionError(f"unexpected relation {rel!r} in the extended instance")
    used = {v for e in edges for v in e}
    vertices = [v for v in jhat.variables if v in used] + [x for g in gadgets for x in g[2]]
    return ScenarioReduction(cnf, canon, out, Hypergraph(vertices, edges), tuple(gadgets))


def threesat_to_scenario(cnf: Instance) -> Hypergraph:
    return threesat_reduction(cnf).hypergraph


def scenario_model(red: ScenarioReduction, f: OperatorAssignment) -> ProjectorAssignment:
    """Forward construction of a quantum model from a satisfying assignment of the CNF.

    The intermediate lifts skip their own re-verification; the assembled
    model is verified as a whole instead.
    """
    f = f.restrict(red.canonical.variables)
    g = lift(f, red.canonical, threesat_definitions(), red.jhat, check=False)
    proj = {v: involution_projector(g[v]) for v in red.hypergraph.vertices if v in g}
    ji_defs = ji_definitions()
    ti = t_instance()
    tout = build_J(ti, ji_defs)
    done: dict[tuple[Matrix, Matrix], list[Matrix]] = {}
    for z1, z2, us in red.gadgets:
        key = (g[z1], g[z2])
        if key not in done:
            h = lift(OperatorAssignment(f.dim, {"Z1": key[0], "Z2": key[1]}), ti, ji_defs, tout, check=False)
            done[key] = [involution_projector(h[f"B0__U{k}"]) for k in (1, 2, 3, 4)]
        proj.update(zip(us, done[key]))
    model = OperatorAssignment(f.dim, {v: proj[v] for v in red.hypergraph.vertices})
    if not verify_quantum_model(red.hypergraph, model).ok:
        raise AssertionError("constructed projectors are not a quantum model")
    return model


def find_d1_model(h: Hypergraph, cap: int = MAX_SEARCH_VERTICES) -> dict[str, int] | None:
    """Exhaustive search for a 0/1 labelling with exactly one 1 on every edge.

    Vertices are decided in their listed order; each decision is followed by
    propagation (a 1 zeroes the rest of its edges, an edge with one open
    vertex and no 1 forces it).
    """
    n = len(h.vertices)
    if n > cap:
        raise CapExceeded(f"model search is limited to {cap} vertices, scenario has {n}")
    idx = {v: k for k, v in enumerate(h.vertices)}
    edges = [[idx[v] for v in e] for e in h.edges]
    incident: list[list[int]] = [[] for _ in range(n)]
    for k, e in enumerate(edges):
        for v in e:
            incident[v].append(k)
    val = [-1] * n
    trail: list[int] = []

    def assign(v: int, x: int) -> bool:
        stack = [(v, x)]
        while stack:
            v, x = stack.pop()
            if val[v] != -1:
                if val[v] != x:
                    return False
                continue
            val[v] = x
            trail.append(v)
            for k in incident[v]:
                e = edges[k]
                ones = [u for u in e if val[u] == 1]
                if len(ones) > 1:
                    return False
                open_ = [u for u in e if val[u] == -1]
                if ones:
                    stack.extend((u, 0) for u in open_)
                elif not open_:
                    return False
                elif len(open_) == 1:
                    stack.append((open_[0], 1))
        return True

    def undo(mark: int) -> None:
        while len(trail) > mark:
            val[trail.pop()] = -1

    def search(start: int) -> bool:
        v = start
        while v < n and val[v] != -1:
            v += 1
        if v == n:
            return True
        for x in (1, 0):
            mark = len(trail)
            if assign(v, x) and search(v + 1):
                return True
            undo(mark)
        return False

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 2 * n + 100))
    try:
        found = search(0)
    finally:
        sys.setrecursionlimit(limit)
    if not found:
        return None
    return {v: val[idx[v]] for v in h.vertices}


def labelling_model(h: Hypergraph, labels: Mapping[str, int]) -> ProjectorAssignment:
    return OperatorAssignment(1, {v: Matrix([[labels[v]]]) for v in h.vertices})


# ---------------------------------------------------------------- 2-ALLOWS-QUANTUM

@dataclass(frozen=True)
class TwoAllowsResult:
    allowed: bool
    model: ProjectorAssignment | None = None
    certificate: TwoSatCertificate | None = None
    clauses: tuple = ()


def two_allows_clauses(h: Hypergraph) -> list[tuple]:
    clauses = []
    for k, e in enumerate(h.edges):
        if len(e) > 2:
            raise InputError(f"edge {k} has {len(e)} vertices; at most 2 allowed", code="oversized_edge")
        if len(e) == 2:
            u, v = e
            clauses.append(((u, 1), (v, 1)))
            clauses.append(((u, -1), (v, -1)))
        else:
            clauses.append(((e[0], 1),))
    return clauses


def two_allows_decide(h: Hypergraph) -> TwoAllowsResult:
    clauses = two_allows_clauses(h)
    res = solve_2sat(clauses)
    if not res.sat:
        return TwoAllowsResult(False, certificate=res.certificate, clauses=tuple(clauses))
    labels = {v: (1 if res.witness[v] == -1 else 0) for v in h.vertices}
    model = labelling_model(h, labels)
    if not verify_quantum_model(h, model).ok:
        raise AssertionError("2SAT witness does not give a quantum model")
    return TwoAllowsResult(True, model=model, clauses=tuple(clauses))


__all__ = [
    "Hypergraph", "hypergraph_from_json", "parse_hypergraph", "ProjectorAssignment", "ModelReport",
    "verify_quantum_model", "involution_projector", "projector_involution", "model_to_involutions",
    "ONE_IN_THREE_POLY", "RESOLUTION_POLY", "one_in_three_holds", "resolution_holds", "comm",
    "ji_sums", "ji_identities", "ji_residuals", "ji_gadget_check", "ScenarioReduction",
    "threesat_reduction", "threesat_to_scenario", "scenario_model", "find_d1_model",
    "labelling_model", "TwoAllowsResult", "two_allows_clauses", "two_allows_decide",
]
