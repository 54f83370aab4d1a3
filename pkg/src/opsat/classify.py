"""Polymorphisms, Schaefer classes, gap verdicts and pp-formulas."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .errors import CapExceeded, InputError, ParseError
from .model import (
    NAME_RE, PM, BooleanRelation, ConstraintLanguage, ScopeEntry, cube, entry_token,
    is_const, load_json, parse_entry,
)

MAX_BOUND = 20


@dataclass(frozen=True)
class BooleanOperation:
    name: str
    arity: int
    table: Mapping[tuple[int, ...], int]

    def __init__(self, arity: int, table: Mapping | Callable[..., int], name: str = ""):
        if arity < 1:
            raise ValueError("operations have positive arity")
        if callable(table) and not isinstance(table, Mapping):
            fn = table
            table = {a: fn(*a) for a in cube(arity)}
        tab = {}
        for a in cube(arity):
            if a not in table:
                raise ValueError(f"operation table is missing {a}")
            v = table[a]
            if v not in PM:
                raise ValueError(f"operation value {v!r} at {a} is not +1/-1")
            tab[a] = int(v)
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "table", tab)
        object.__setattr__(self, "name", name)

    def __call__(self, *args: int) -> int:
        return self.table[tuple(args)]

    def __hash__(self):
        return hash((self.arity, tuple(self.table[a] for a in cube(self.arity))))

    def __eq__(self, other):
        if not isinstance(other, BooleanOperation):
            return NotImplemented
        return self.arity == other.arity and self.table == other.table

    def compose(self, inner: Sequence["BooleanOperation"]) -> "BooleanOperation":
        """f(g_1(x), ..., g_m(x)) where every g_i has the same arity."""
        if len(inner) != self.arity:
            raise ValueError("composition needs one inner operation per argument")
        k = {g.arity for g in inner}
        if len(k) != 1:
            raise ValueError("inner operations must share one arity")
        k = k.pop()
        return BooleanOperation(k, lambda *x: self(*(g(*x) for g in inner)))

    def outputs(self) -> list[int]:
        return [self.table[a] for a in cube(self.arity)]


def projection(m: int, i: int) -> BooleanOperation:
    """The i-th (1-based) projection of arity m."""
    return BooleanOperation(m, lambda *x: x[i - 1], name=f"proj{m}_{i}")


def _maj(a, b, c):
    return a if a == b or a == c else b


const_false = BooleanOperation(1, lambda a: 1, name="const_false")
const_true = BooleanOperation(1, lambda a: -1, name="const_true")
maj3 = BooleanOperation(3, _maj, name="maj3")
and2 = BooleanOperation(2, lambda a, b: -1 if a == b == -1 else 1, name="and2")
or2 = BooleanOperation(2, lambda a, b: -1 if -1 in (a, b) else 1, name="or2")
xor3 = BooleanOperation(3, lambda a, b, c: a * b * c, name="xor3")
not1 = BooleanOperation(1, lambda a: -a, name="not1")

BUILTINS = {op.name: op for op in (const_false, const_true, maj3, and2, or2, xor3, not1)}


def builtin(name: str) -> BooleanOperation:
    if name in BUILTINS:
        return BUILTINS[name]
    if name.startswith("proj"):
        try:
            m, i = name[4:].split("_")
            return projection(int(m), int(i))
        except ValueError:
            pass
    raise InputError(f"unknown operation {name!r}", code="unknown_operation")


def is_invariant(rel: BooleanRelation, f: BooleanOperation) -> bool:
    """True iff applying f coordinatewise to any f.arity tuples of rel stays in rel."""
    tuples = rel.tuples
    for choice in itertools.product(tuples, repeat=f.arity):
        image = tuple(f.table[col] for col in zip(*choice))
        if image not in rel:
            return False
    return True


def language_invariant(lang: Mapping[str, BooleanRelation], f: BooleanOperation) -> bool:
    return all(is_invariant(r, f) for r in lang.values())


@dataclass(frozen=True)
class SchaeferFlags:
    zero_valid: bool
    one_valid: bool
    bijunctive: bool
    horn: bool
    dual_horn: bool
    affine: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


SCHAEFER_BASES = {
    "zero_valid": const_false,
    "one_valid": const_true,
    "bijunctive": maj3,
    "horn": and2,
    "dual_horn": or2,
    "affine": xor3,
}


def schaefer_flags(lang: Mapping[str, BooleanRelation]) -> SchaeferFlags:
    return SchaeferFlags(**{k: language_invariant(lang, op) for k, op in SCHAEFER_BASES.items()})


NO_GAP_FLAGS = ("zero_valid", "one_valid", "bijunctive", "horn", "dual_horn")
FLAG_LABELS = {"zero_valid": "0-valid", "one_valid": "1-valid", "bijunctive": "bijunctive",
               "horn": "Horn", "dual_horn": "dual-Horn", "affine": "affine"}


@dataclass(frozen=True)
class Verdict:
    kind: str  # "NoGap" or "GapsOfAllKinds"
    flags: SchaeferFlags
    statements: tuple[str, ...]

    def to_json(self) -> dict:
        return {"verdict": self.kind, "flags": self.flags.to_json(), "statements": list(self.statements)}


def gap_verdict(lang: Mapping[str, BooleanRelation]) -> Verdict:
    flags = schaefer_flags(lang)
    holding = [k for k in NO_GAP_FLAGS if getattr(flags, k)]
    if holding:
        stmts = (
            "language is " + ", ".join(FLAG_LABELS[k] for k in holding),
            "no satisfiability gap of the first, second or third kind",
            "SAT*(A), SAT**(A) and SAT(A) coincide",
            "SAT**(A + T) is decidable in polynomial time",
        )
        return Verdict("NoGap", flags, stmts)
    stmts = (
        "language is not 0-valid, 1-valid, bijunctive, Horn or dual-Horn",
        "A has a satisfiability gap of the first kind",
        "A has a satisfiability gap of the second kind",
        "A + T has a satisfiability gap of the third kind",
        "SAT**(A + T) is undecidable",
    )
    return Verdict("GapsOfAllKinds", flags, stmts)


MINIMAL_CLONES = {
    "I0": const_false,
    "I1": const_true,
    "D2": maj3,
    "E2": and2,
    "V2": or2,
    "L2": xor3,
    "N2": not1,
}

FULL_EXPRESSIVITY = "Pol(A) = I2: every Boolean relation is pp-definable from A"


def minimal_clone_analysis(lang: Mapping[str, BooleanRelation]) -> frozenset[str]:
    """Minimal clones (by name) whose base operation preserves every relation of lang."""
    return frozenset(name for name, op in MINIMAL_CLONES.items() if language_invariant(lang, op))


def clone_report(lang: Mapping[str, BooleanRelation]) -> dict:
    found = minimal_clone_analysis(lang)
    ordered = [n for n in MINIMAL_CLONES if n in found]
    out = {"clones": ordered}
    if not found:
        out["note"] = FULL_EXPRESSIVITY
    return out


# ---------------------------------------------------------------- pp-formulas

class Atom(tuple):
    __slots__ = ()

    def __new__(cls, relation: str, scope: Iterable[ScopeEntry]):
        return super().__new__(cls, (relation, tuple(scope)))

    @property
    def relation(self) -> str:
        return self[0]

    @property
    def scope(self) -> tuple[ScopeEntry, ...]:
        return self[1]


@dataclass(frozen=True)
class PpFormula:
    free: tuple[str, ...]
    bound: tuple[str, ...]
    atoms: tuple[Atom, ...]

    def __init__(self, free: Iterable[str], bound: Iterable[str], atoms: Iterable):
        free, bound = tuple(free), tuple(bound)
        atoms = tuple(Atom(r, s) for r, s in atoms)
        names = free + bound
        for n in names:
            if not isinstance(n, str) or not NAME_RE.match(n):
                raise InputError(f"bad formula variable {n!r}", code="invalid_value")
        if len(set(names)) != len(names):
            raise InputError("free and bound variable names must be distinct", code="invalid_value")
        known = set(names)
        for k, (rel, scope) in enumerate(atoms):
            for e in scope:
                if not is_const(e) and e not in known:
                    raise InputError(f"atom {k} uses unknown variable {e!r}",
                                     code="undeclared_variable", context=f"atoms[{k}]")
        object.__setattr__(self, "free", free)
        object.__setattr__(self, "bound", bound)
        object.__setattr__(self, "atoms", atoms)

    @property
    def arity(self) -> int:
        return len(self.free)

    def to_json(self) -> dict:
        return {
            "free": list(self.free),
            "bound": list(self.bound),
            "atoms": [{"relation": r, "scope": [entry_token(e) for e in s]} for r, s in self.atoms],
        }

    def check_language(self, lang: Mapping[str, BooleanRelation]) -> None:
        for k, (rel, scope) in enumerate(self.atoms):
            if rel not in lang:
                raise InputError(f"unknown relation {rel!r}", code="unknown_relation", context=f"atoms[{k}]")
            if lang[rel].arity != len(scope):
                raise InputError(f"atom on {rel!r} has {len(scope)} arguments, arity is {lang[rel].arity}",
                                 code="arity_mismatch", context=f"atoms[{k}]")


def formula_from_json(doc, context: str = "formula") -> PpFormula:
    if not isinstance(doc, dict) or not all(k in doc for k in ("free", "bound", "atoms")):
        raise ParseError("formula needs 'free', 'bound' and 'atoms'", code="malformed", context=context)
    atoms = []
    for k, a in enumerate(doc["atoms"]):
        ctx = f"{context}.atoms[{k}]"
        if not isinstance(a, dict) or "relation" not in a or "scope" not in a:
            raise ParseError("atom needs 'relation' and 'scope'", code="malformed", context=ctx)
        atoms.append((a["relation"], [parse_entry(t, ctx) for t in a["scope"]]))
    return PpFormula(doc["free"], doc["bound"], atoms)


def parse_formula(text: str) -> PpFormula:
    return formula_from_json(load_json(text))


def identity_formula(rel_name: str, arity: int) -> PpFormula:
    xs = [f"x{i}" for i in range(1, arity + 1)]
    return PpFormula(xs, (), [(rel_name, xs)])


def pp_witnesses(phi: PpFormula, lang: Mapping[str, BooleanRelation],
                 a: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Assignments to the bound variables making every atom true, in canonical order.

    The search walks the bound variables left to right trying -1 before +1, so
    the enumeration order is the lexicographic one of the whole cube; atoms are
    checked as soon as their variables are fixed.
    """
    if len(a) != len(phi.free):
        raise ValueError(f"formula has {len(phi.free)} free variables, got {len(a)} values")
    s = len(phi.bound)
    if s > MAX_BOUND:
        raise CapExceeded(f"pp evaluation is limited to {MAX_BOUND} quantified variables, got {s}")
    phi.check_language(lang)
    pos = {v: k for k, v in enumerate(phi.bound)}
    env = {v: int(x) for v, x in zip(phi.free, a)}
    # atoms grouped by the last bound variable they mention (-1 = none)
    by_level: list[list] = [[] for _ in range(s + 1)]
    for rel, scope in phi.atoms:
        last = max((pos[e] for e in scope if not is_const(e) and e in pos), default=-1)
        by_level[last + 1].append((lang[rel], scope))

    def ok(level: int) -> bool:
        for rel, scope in by_level[level]:
            if tuple(e if is_const(e) else env[e] for e in scope) not in rel:
                return False
        return True

    if not ok(0):
        return
    ys = phi.bound
    vals = [0] * s

    def walk(k: int):
        if k == s:
            yield tuple(vals)
            return
        for v in PM:
            env[ys[k]] = v
            vals[k] = v
            if ok(k + 1):
                yield from walk(k + 1)
        del env[ys[k]]

    yield from walk(0)


def first_witness(phi: PpFormula, lang: Mapping[str, BooleanRelation],
                  a: Sequence[int]) -> tuple[int, ...] | None:
    return next(pp_witnesses(phi, lang, a), None)


def eval_pp(phi: PpFormula, lang: Mapping[str, BooleanRelation], a: Sequence[int]) -> bool:
    return first_witness(phi, lang, a) is not None


def pp_defines(phi: PpFormula, lang: Mapping[str, BooleanRelation]) -> BooleanRelation:
    r = len(phi.free)
    if r == 0:
        raise ValueError("a defining formula needs at least one free variable")
    return BooleanRelation(r, (a for a in cube(r) if eval_pp(phi, lang, a)))


def remove_constants(phi: PpFormula, lang: Mapping[str, BooleanRelation]) -> tuple[PpFormula, ConstraintLanguage]:
    """Replace constants by fresh bound variables pinned by unary singleton relations.

    Returns the new formula together with ``lang`` extended by the two
    singleton relations (named ``const_pos`` / ``const_neg``).
    """
    extra = {"const_pos": BooleanRelation(1, [(1,)]), "const_neg": BooleanRelation(1, [(-1,)])}
    used = set(phi.free) | set(phi.bound)
    fresh: dict[int, str] = {}

    def name_for(c: int) -> str:
        if c not in fresh:
            base = "c_pos" if c == 1 else "c_neg"
            n, k = base, 0
            while n in used:
                k += 1
                n = f"{base}{k}"
            used.add(n)
            fresh[c] = n
        return fresh[c]

    atoms = [(r, [name_for(e) if is_const(e) else e for e in s]) for r, s in phi.atoms]
    for c, n in fresh.items():
        atoms.append(("const_pos" if c == 1 else "const_neg", [n]))
    new = PpFormula(phi.free, phi.bound + tuple(fresh[c] for c in fresh), atoms)
    return new, ConstraintLanguage(lang).union(extra)


__all__ = [
    "BooleanOperation", "projection", "const_false", "const_true", "maj3", "and2", "or2",
    "xor3", "not1", "BUILTINS", "builtin", "is_invariant", "language_invariant",
    "SchaeferFlags", "schaefer_flags", "Verdict", "gap_verdict", "MINIMAL_CLONES",
    "minimal_clone_analysis", "clone_report", "FULL_EXPRESSIVITY", "Atom", "PpFormula",
    "formula_from_json", "parse_formula", "identity_formula", "pp_witnesses", "first_witness",
    "eval_pp", "pp_defines", "remove_constants", "MAX_BOUND",
]
