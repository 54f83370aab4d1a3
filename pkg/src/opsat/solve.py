"""Boolean decision procedures: brute force, 2SAT, (dual) Horn and parity systems.

Literals are pairs ``(variable, sign)``; sign +1 is the positive literal.  A
literal ``(v, s)`` is true under an assignment ``a`` exactly when
``a[v] == -s`` (recall -1 encodes true).
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import CapExceeded, InputError
from .model import PM, BooleanRelation, Instance, boolean_value, cube, is_const, scope_values

BRUTE_CAP = 24

Literal = tuple[Hashable, int]
Clause = tuple[Literal, ...]


def lit_true(lit: Literal, a: Mapping) -> bool:
    v, s = lit
    return a[v] == -s


def neg(lit: Literal) -> Literal:
    return (lit[0], -lit[1])


def clause_satisfied(clause: Sequence[Literal], a: Mapping) -> bool:
    return any(lit_true(l, a) for l in clause)


def clauses_satisfied(clauses: Iterable[Sequence[Literal]], a: Mapping) -> bool:
    return all(clause_satisfied(c, a) for c in clauses)


def clause_variables(clauses: Iterable[Sequence[Literal]]) -> list:
    seen = {}
    for c in clauses:
        for v, _ in c:
            seen.setdefault(v, None)
    return list(seen)


@dataclass(frozen=True)
class SolveResult:
    sat: bool
    witness: dict | None = None
    certificate: object = None


# ---------------------------------------------------------------- brute force

def solve_brute(inst: Instance) -> tuple[Fraction, dict]:
    """Exact maximum fraction of satisfied constraints, lexicographically smallest attaining witness."""
    n = len(inst.variables)
    if n > BRUTE_CAP:
        raise CapExceeded(f"brute force is limited to {BRUTE_CAP} variables, instance has {n}")
    names = inst.variables
    rels = [(inst.language[r], s) for r, s in inst.constraints]
    m = len(rels)
    if m == 0:
        return Fraction(1), {v: -1 for v in names}
    best, best_a = -1, None
    for vals in cube(n):
        a = dict(zip(names, vals))
        sat = sum(1 for rel, scope in rels if scope_values(scope, a) in rel)
        if sat > best:
            best, best_a = sat, a
            if sat == m:
                break
    return Fraction(best, m), best_a


# ---------------------------------------------------------------- 2SAT

@dataclass(frozen=True)
class TwoSatCertificate:
    """x reaches not-x and not-x reaches x; or an empty input clause."""

    variable: Hashable = None
    path_to_neg: tuple[Literal, ...] = ()
    path_to_pos: tuple[Literal, ...] = ()
    empty_clause: int | None = None


class ImplicationGraph:
    def __init__(self, clauses: Sequence[Sequence[Literal]]):
        self.succ: dict[Literal, list[Literal]] = {}
        self.edges: set[tuple[Literal, Literal]] = set()
        for c in clauses:
            if len(c) == 1:
                (l,) = c
                self._add(neg(l), l)
            elif len(c) == 2:
                l1, l2 = c
                self._add(neg(l1), l2)
                self._add(neg(l2), l1)
        for v in clause_variables(clauses):
            self.succ.setdefault((v, 1), [])
            self.succ.setdefault((v, -1), [])

    def _add(self, u: Literal, w: Literal) -> None:
        self.succ.setdefault(u, [])
        if (u, w) not in self.edges:
            self.edges.add((u, w))
            self.succ[u].append(w)

    def path(self, src: Literal, dst: Literal) -> tuple[Literal, ...] | None:
        """Shortest literal path from src to dst (breadth first), or None."""
        parent = {src: None}
        q = deque([src])
        while q and dst not in parent:
            u = q.popleft()
            for w in self.succ.get(u, ()):
                if w not in parent:
                    parent[w] = u
                    q.append(w)
        if dst not in parent:
            return None
        out = [dst]
        while out[-1] != src:
            out.append(parent[out[-1]])
        return tuple(reversed(out))

    def reach(self, src: Literal) -> list[Literal]:
        seen = {src}
        order = [src]
        q = deque([src])
        while q:
            u = q.popleft()
            for w in self.succ.get(u, ()):
                if w not in seen:
                    seen.add(w)
                    order.append(w)
                    q.append(w)
        return order


def solve_2sat(clauses: Sequence[Sequence[Literal]]) -> SolveResult:
    clauses = [tuple(c) for c in clauses]
    for i, c in enumerate(clauses):
        if len(c) > 2:
            raise InputError(f"clause {i} has {len(c)} literals; 2SAT takes at most 2", code="not_2cnf")
        if len(c) == 0:
            return SolveResult(False, certificate=TwoSatCertificate(empty_clause=i))
    g = ImplicationGraph(clauses)
    variables = clause_variables(clauses)
    for v in variables:
        p = g.path((v, 1), (v, -1))
        if p is None:
            continue
        q = g.path((v, -1), (v, 1))
        if q is not None:
            return SolveResult(False, certificate=TwoSatCertificate(v, p, q))
    # assign: pick the positive literal unless it implies its negation, then close under implication
    true_lits: set[Literal] = set()
    assigned: dict = {}
    for v in variables:
        if v in assigned:
            continue
        lit = (v, 1)
        if g.path(lit, neg(lit)) is not None:
            lit = neg(lit)
        for l in g.reach(lit):
            if l[0] not in assigned:
                assigned[l[0]] = -l[1]
                true_lits.add(l)
    if not clauses_satisfied(clauses, assigned):
        raise AssertionError("2SAT witness failed verification")
    return SolveResult(True, witness=assigned)


def check_2sat_certificate(clauses: Sequence[Sequence[Literal]], cert: TwoSatCertificate) -> bool:
    clauses = [tuple(c) for c in clauses]
    if cert.empty_clause is not None:
        return 0 <= cert.empty_clause < len(clauses) and len(clauses[cert.empty_clause]) == 0
    edges = ImplicationGraph(clauses).edges
    v = cert.variable

    def is_path(p, a, b):
        return (len(p) >= 2 and p[0] == a and p[-1] == b
                and all((p[k], p[k + 1]) in edges for k in range(len(p) - 1)))

    return is_path(cert.path_to_neg, (v, 1), (v, -1)) and is_path(cert.path_to_pos, (v, -1), (v, 1))


# ---------------------------------------------------------------- Horn

@dataclass(frozen=True)
class Step:
    """One clause of a resolution derivation.

    ``source`` is ("input", clause index) or ("resolve", i, j) with i, j
    earlier step indices, j a unit clause.
    """

    clause: tuple[Literal, ...]
    source: tuple


def _unit_resolve(clause: Sequence[Literal], unit: Literal) -> tuple[Literal, ...] | None:
    if neg(unit) not in clause:
        return None
    return tuple(l for l in clause if l != neg(unit))


def solve_horn(clauses: Sequence[Sequence[Literal]]) -> SolveResult:
    """Forward chaining from the all-false assignment; UNSAT comes with a unit-resolution derivation."""
    clauses = [tuple(dict.fromkeys(c)) for c in clauses]
    for i, c in enumerate(clauses):
        if sum(1 for _, s in c if s == 1) > 1:
            raise InputError(f"clause {i} has more than one positive literal", code="not_horn")
    steps: list[Step] = []
    unit_step: dict = {}  # variable -> index of the step deriving the positive unit

    def derive(ci: int) -> int:
        """Resolve clause ci against the known positive units; return final step index."""
        steps.append(Step(clauses[ci], ("input", ci)))
        cur = len(steps) - 1
        for v, s in clauses[ci]:
            if s == -1:
                res = _unit_resolve(steps[cur].clause, (v, 1))
                steps.append(Step(res, ("resolve", cur, unit_step[v])))
                cur = len(steps) - 1
        return cur

    true_vars: set = set()
    changed = True
    while changed:
        changed = False
        for ci, c in enumerate(clauses):
            if not all(v in true_vars for v, s in c if s == -1):
                continue
            pos = [v for v, s in c if s == 1]
            if not pos:
                last = derive(ci)
                assert steps[last].clause == ()
                return SolveResult(False, certificate=tuple(steps))
            if pos[0] not in true_vars:
                unit_step[pos[0]] = derive(ci)
                true_vars.add(pos[0])
                changed = True
    witness = {v: (-1 if v in true_vars else 1) for v in clause_variables(clauses)}
    if not clauses_satisfied(clauses, witness):
        raise AssertionError("Horn witness failed verification")
    return SolveResult(True, witness=witness)


def _flip(clauses):
    return [tuple((v, -s) for v, s in c) for c in clauses]


def solve_dual_horn(clauses: Sequence[Sequence[Literal]]) -> SolveResult:
    """Mirror image of solve_horn: at most one negative literal, start from all-true."""
    clauses = [tuple(c) for c in clauses]
    for i, c in enumerate(clauses):
        if sum(1 for _, s in c if s == -1) > 1:
            raise InputError(f"clause {i} has more than one negative literal", code="not_dual_horn")
    res = solve_horn(_flip(clauses))
    if res.sat:
        witness = {v: -x for v, x in res.witness.items()}
        if not clauses_satisfied(clauses, witness):
            raise AssertionError("dual Horn witness failed verification")
        return SolveResult(True, witness=witness)
    steps = tuple(Step(tuple((v, -s) for v, s in st.clause), st.source) for st in res.certificate)
    return SolveResult(False, certificate=steps)


def check_derivation(clauses: Sequence[Sequence[Literal]], steps: Sequence[Step]) -> bool:
    """Every step is an input clause or a unit resolvent of earlier ones; the last is empty."""
    clauses = [tuple(dict.fromkeys(c)) for c in clauses]
    if not steps or steps[-1].clause != ():
        return False
    for k, st in enumerate(steps):
        if st.source[0] == "input":
            if not (0 <= st.source[1] < len(clauses)) or tuple(st.clause) != clauses[st.source[1]]:
                return False
        elif st.source[0] == "resolve":
            i, j = st.source[1], st.source[2]
            if not (0 <= i < k and 0 <= j < k):
                return False
            unit = steps[j].clause
            if len(unit) != 1:
                return False
            res = _unit_resolve(steps[i].clause, unit[0])
            if res is None or set(res) != set(st.clause):
                return False
        else:
            return False
    return True


# ---------------------------------------------------------------- parity systems

@dataclass(frozen=True)
class ParitySystem:
    """Equations prod_{i in S} x_i = b over variables 0..n-1."""

    nvars: int
    rows: tuple[tuple[frozenset[int], int], ...]

    def __init__(self, nvars: int, rows: Iterable[tuple[Iterable[int], int]]):
        clean = []
        for k, (idx, b) in enumerate(rows):
            idx = frozenset(idx)
            if b not in PM:
                raise ValueError(f"row {k} has right-hand side {b!r}")
            if any(i < 0 or i >= nvars for i in idx):
                raise ValueError(f"row {k} mentions a variable outside 0..{nvars - 1}")
            clean.append((idx, b))
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "rows", tuple(clean))

    def satisfied_by(self, x: Sequence[int]) -> bool:
        for idx, b in self.rows:
            p = 1
            for i in idx:
                p *= x[i]
            if p != b:
                return False
        return True


def solve_gf2(sys: ParitySystem) -> SolveResult:
    """Elimination in the multiplicative encoding; UNSAT returns the rows whose product reads 1 = -1."""
    work = []  # (variable mask, rhs bit, row-combination mask); rhs bit 1 means -1
    for k, (idx, b) in enumerate(sys.rows):
        m = 0
        for i in idx:
            m |= 1 << i
        work.append([m, 1 if b == -1 else 0, 1 << k])
    pivots: list[tuple[int, list]] = []
    for row in work:
        for col, prow in pivots:
            if row[0] >> col & 1:
                row[0] ^= prow[0]
                row[1] ^= prow[1]
                row[2] ^= prow[2]
        if row[0] == 0:
            if row[1]:
                cert = tuple(k for k in range(len(work)) if row[2] >> k & 1)
                return SolveResult(False, certificate=cert)
            continue
        col = (row[0] & -row[0]).bit_length() - 1
        for _, prow in pivots:
            if prow[0] >> col & 1:
                prow[0] ^= row[0]
                prow[1] ^= row[1]
                prow[2] ^= row[2]
        pivots.append((col, row))
    x = [1] * sys.nvars
    for col, prow in pivots:
        # fully reduced: the row is x_col times free variables, all free set to +1
        x[col] = -1 if prow[1] else 1
    if not sys.satisfied_by(x):
        raise AssertionError("parity witness failed verification")
    return SolveResult(True, witness={i: x[i] for i in range(sys.nvars)})


def check_parity_certificate(sys: ParitySystem, rows: Sequence[int]) -> bool:
    """Multiplying the chosen rows cancels every variable but yields rhs -1."""
    if not rows or len(set(rows)) != len(rows):
        return False
    mask, b = 0, 1
    for k in rows:
        idx, rhs = sys.rows[k]
        for i in idx:
            mask ^= 1 << i
        b *= rhs
    return mask == 0 and b == -1


# ---------------------------------------------------------------- instance conversion

def _positions_clause(rel: BooleanRelation, lits: tuple[tuple[int, int], ...]) -> bool:
    return all(any(t[p] == -s for p, s in lits) for t in rel)


def _models(arity: int, clauses) -> set:
    return {t for t in cube(arity) if all(any(t[p] == -s for p, s in c) for c in clauses)}


def relation_clauses(rel: BooleanRelation, kind: str) -> list[tuple[tuple[int, int], ...]]:
    """Clauses over positions 0..arity-1 whose models are exactly rel.

    ``kind`` selects the clause shapes: "2sat" (at most two literals), "horn"
    (at most one positive), "dualhorn" (at most one negative).  Raises
    InputError when rel is not expressible that way.
    """
    r = rel.arity
    cands = []
    for size in range(0, r + 1):
        if kind == "2sat" and size > 2:
            break
        for pos in itertools.combinations(range(r), size):
            for signs in itertools.product((1, -1), repeat=size):
                if kind == "horn" and signs.count(1) > 1:
                    continue
                if kind == "dualhorn" and signs.count(-1) > 1:
                    continue
                cands.append(tuple(zip(pos, signs)))
    implied = [c for c in cands if _positions_clause(rel, c)]
    minimal = [c for c in implied if not any(set(d) < set(c) for d in implied)]
    if _models(r, minimal) != set(rel.tuples):
        raise InputError(f"relation is not expressible as a {kind} formula", code="wrong_class")
    return minimal


def instance_clauses(inst: Instance, kind: str) -> list[Clause]:
    """Translate every constraint into clauses over the instance variables.

    Constants are folded in and repeated variables merged; a constraint may
    therefore yield the empty clause.
    """
    cache: dict[str, list] = {}
    out: list[Clause] = []
    for rel_name, scope in inst.constraints:
        if rel_name not in cache:
            cache[rel_name] = relation_clauses(inst.language[rel_name], kind)
        for pc in cache[rel_name]:
            lits: dict = {}
            satisfied = False
            for p, s in pc:
                e = scope[p]
                if is_const(e):
                    if e == -s:
                        satisfied = True
                        break
                    continue
                if lits.get(e, s) != s:
                    satisfied = True
                    break
                lits[e] = s
            if not satisfied:
                out.append(tuple(lits.items()))
    return out


def relation_equations(rel: BooleanRelation) -> list[tuple[frozenset[int], int]]:
    """Parity equations over positions whose solution set is exactly rel."""
    r = rel.arity
    eqs = []
    for size in range(0, r + 1):
        for pos in itertools.combinations(range(r), size):
            for b in PM:
                if all(_prod(t, pos) == b for t in rel):
                    eqs.append((frozenset(pos), b))
    sols = {t for t in cube(r) if all(_prod(t, s) == b for s, b in eqs)}
    if sols != set(rel.tuples):
        raise InputError("relation is not affine", code="wrong_class")
    return eqs


def _prod(t, pos) -> int:
    p = 1
    for i in pos:
        p *= t[i]
    return p


def instance_parity(inst: Instance) -> tuple[ParitySystem, list[str]]:
    """Parity system equivalent to an instance over affine relations.

    Rows whose variables cancel entirely are kept only when they read 1 = -1.
    """
    index = {v: k for k, v in enumerate(inst.variables)}
    cache: dict[str, list] = {}
    rows = []
    for rel_name, scope in inst.constraints:
        if rel_name not in cache:
            cache[rel_name] = relation_equations(inst.language[rel_name])
        for pos, b in cache[rel_name]:
            vs: set[int] = set()
            for p in pos:
                e = scope[p]
                if is_const(e):
                    b *= e
                else:
                    vs ^= {index[e]}
            if vs or b == -1:
                rows.append((frozenset(vs), b))
    return ParitySystem(len(inst.variables), rows), list(inst.variables)


def solve_instance(inst: Instance, method: str) -> SolveResult:
    """Decide Boolean satisfiability of an instance with the chosen procedure."""
    if method == "brute":
        value, witness = solve_brute(inst)
        return SolveResult(value == 1, witness=witness if value == 1 else None, certificate=value)
    if method in ("2sat", "horn", "dualhorn"):
        clauses = instance_clauses(inst, method)
        res = {"2sat": solve_2sat, "horn": solve_horn, "dualhorn": solve_dual_horn}[method](clauses)
        if res.sat:
            w = {v: res.witness.get(v, 1 if method != "dualhorn" else -1) for v in inst.variables}
            if boolean_value(inst, w) != 1:
                raise AssertionError("witness does not satisfy the instance")
            return SolveResult(True, witness=w)
        return SolveResult(False, certificate=(clauses, res.certificate))
    if method == "gf2":
        sys, names = instance_parity(inst)
        res = solve_gf2(sys)
        if res.sat:
            w = {names[i]: x for i, x in res.witness.items()}
            if boolean_value(inst, w) != 1:
                raise AssertionError("witness does not satisfy the instance")
            return SolveResult(True, witness=w)
        return SolveResult(False, certificate=(sys, res.certificate))
    raise InputError(f"unknown method {method!r}", code="unknown_method")


__all__ = [
    "BRUTE_CAP", "solve_brute", "solve_2sat", "solve_horn", "solve_dual_horn", "solve_gf2",
    "SolveResult", "TwoSatCertificate", "ImplicationGraph", "Step", "ParitySystem",
    "check_2sat_certificate", "check_derivation", "check_parity_certificate",
    "relation_clauses", "instance_clauses", "relation_equations", "instance_parity",
    "solve_instance", "lit_true", "neg", "clause_satisfied", "clauses_satisfied",
]
