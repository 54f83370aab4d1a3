"""Exact complex-rational matrices and operator assignments.

Entries live in Q(i).  Matrices are square, immutable and of positive
dimension.  Products skip zero entries, which keeps Pauli-tensor
computations cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .errors import InputError, ParseError, PredicateError, VerificationError
from .fourier import MultilinearPoly, fmt_fraction, indicator_poly, parse_fraction
from .model import BooleanRelation, Instance, ScopeEntry, is_const, load_json

_ZERO = Fraction(0)


class GaussianRational:
    """A complex number with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @staticmethod
    def of(x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            return GaussianRational(Fraction(x.real), Fraction(x.imag))
        return GaussianRational(x)

    def __repr__(self) -> str:
        if not self.im:
            return f"G({self.re})"
        return f"G({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"

    def __eq__(self, other) -> bool:
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.re == other and not self.im
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __add__(self, other):
        o = GaussianRational.of(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = GaussianRational.of(other)
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return GaussianRational.of(other) - self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other):
        o = GaussianRational.of(other)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = GaussianRational.of(other)
        n = o.abs2()
        if not n:
            raise ZeroDivisionError("division by zero")
        return GaussianRational((self.re * o.re + self.im * o.im) / n, (self.im * o.re - self.re * o.im) / n)

    def __rtruediv__(self, other):
        return GaussianRational.of(other) / self

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def to_json(self) -> dict:
        return {"re": fmt_fraction(self.re), "im": fmt_fraction(self.im)}


G = GaussianRational
ZERO = G(0)
ONE = G(1)
I_UNIT = G(0, 1)


class Matrix:
    """Square matrix over Q(i)."""

    __slots__ = ("dim", "rows", "_hash")

    def __init__(self, rows: Iterable[Iterable]):
        rows = tuple(tuple(GaussianRational.of(x) for x in r) for r in rows)
        d = len(rows)
        if d < 1:
            raise ValueError("matrices must have dimension at least 1")
        if any(len(r) != d for r in rows):
            raise ValueError("matrix is not square")
        object.__setattr__(self, "dim", d)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, key, value):
        raise AttributeError("Matrix is immutable")

    @classmethod
    def _raw(cls, rows: tuple) -> "Matrix":
        m = object.__new__(cls)
        object.__setattr__(m, "dim", len(rows))
        object.__setattr__(m, "rows", rows)
        object.__setattr__(m, "_hash", None)
        return m

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.dim == other.dim and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(self.rows))
        return self._hash

    def __repr__(self) -> str:
        return f"Matrix({[[x for x in r] for r in self.rows]!r})"

    def _check(self, other: "Matrix") -> None:
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix._raw(tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix._raw(tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def __neg__(self) -> "Matrix":
        return Matrix._raw(tuple(tuple(-a for a in r) for r in self.rows))

    def scalar_mul(self, c) -> "Matrix":
        c = GaussianRational.of(c)
        if c == 1:
            return self
        return Matrix._raw(tuple(tuple(c * a if a else ZERO for a in r) for r in self.rows))

    def __mul__(self, other):
        if isinstance(other, Matrix):
            return self @ other
        return self.scalar_mul(other)

    def __rmul__(self, other):
        return self.scalar_mul(other)

    def _sparse_rows(self):
        return [[(j, x.re, x.im) for j, x in enumerate(r) if x] for r in self.rows]

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        d = self.dim
        brows = other._sparse_rows()
        out = []
        for r in self.rows:
            acc_re = [_ZERO] * d
            acc_im = [_ZERO] * d
            for k, a in enumerate(r):
                if not a:
                    continue
                ar, ai = a.re, a.im
                for j, br, bi in brows[k]:
                    if ai:
                        if bi:
                            acc_re[j] += ar * br - ai * bi
                            acc_im[j] += ar * bi + ai * br
                        else:
                            acc_re[j] += ar * br
                            acc_im[j] += ai * br
                    elif bi:
                        acc_re[j] += ar * br
                        acc_im[j] += ar * bi
                    else:
                        acc_re[j] += ar * br
            out.append(tuple(GaussianRational(x, y) for x, y in zip(acc_re, acc_im)))
        return Matrix._raw(tuple(out))

    def conjugate_transpose(self) -> "Matrix":
        d = self.dim
        return Matrix._raw(tuple(tuple(self.rows[j][i].conjugate() for j in range(d)) for i in range(d)))

    @property
    def H(self) -> "Matrix":
        return self.conjugate_transpose()

    def transpose(self) -> "Matrix":
        return Matrix._raw(tuple(zip(*self.rows)))

    def kron(self, other: "Matrix") -> "Matrix":
        out = []
        for r in self.rows:
            for s in other.rows:
                out.append(tuple((a * b if a and b else ZERO) for a in r for b in s))
        return Matrix._raw(tuple(out))

    def trace(self) -> GaussianRational:
        t = ZERO
        for i in range(self.dim):
            t = t + self.rows[i][i]
        return t

    def is_zero(self) -> bool:
        return not any(x for r in self.rows for x in r)

    def is_identity(self) -> bool:
        return self == identity(self.dim)

    def is_diagonal(self) -> bool:
        return all(not x for i, r in enumerate(self.rows) for j, x in enumerate(r) if i != j)

    def diagonal(self) -> list[GaussianRational]:
        return [self.rows[i][i] for i in range(self.dim)]

    def column(self, j: int) -> list[GaussianRational]:
        return [r[j] for r in self.rows]

    def is_hermitian(self) -> bool:
        return self == self.conjugate_transpose()

    def is_involution(self) -> bool:
        return (self @ self).is_identity()

    def is_idempotent(self) -> bool:
        return self @ self == self

    def commutes(self, other: "Matrix") -> bool:
        self._check(other)
        return self @ other == other @ self

    def commutator(self, other: "Matrix") -> "Matrix":
        return self @ other - other @ self

    def inverse(self) -> "Matrix":
        """Gauss-Jordan inverse; raises ZeroDivisionError when singular."""
        d = self.dim
        a = [list(r) + [ONE if i == j else ZERO for j in range(d)] for i, r in enumerate(self.rows)]
        for col in range(d):
            piv = next((k for k in range(col, d) if a[k][col]), None)
            if piv is None:
                raise ZeroDivisionError("matrix is singular")
            a[col], a[piv] = a[piv], a[col]
            inv = ONE / a[col][col]
            a[col] = [x * inv for x in a[col]]
            for k in range(d):
                if k != col and a[k][col]:
                    f = a[k][col]
                    a[k] = [x - f * y for x, y in zip(a[k], a[col])]
        return Matrix._raw(tuple(tuple(r[d:]) for r in a))

    def to_json(self) -> dict:
        return {"dim": self.dim, "rows": [[x.to_json() for x in r] for r in self.rows]}


def identity(d: int) -> Matrix:
    return _identity(d)


@lru_cache(maxsize=64)
def _identity(d: int) -> Matrix:
    if d < 1:
        raise ValueError("matrices must have dimension at least 1")
    return Matrix._raw(tuple(tuple(ONE if i == j else ZERO for j in range(d)) for i in range(d)))


def zero(d: int) -> Matrix:
    return Matrix._raw(tuple(tuple(ZERO for _ in range(d)) for _ in range(d)))


def diag(values: Sequence) -> Matrix:
    d = len(values)
    vals = [GaussianRational.of(v) for v in values]
    return Matrix._raw(tuple(tuple(vals[i] if i == j else ZERO for j in range(d)) for i in range(d)))


def kron(*ms: Matrix) -> Matrix:
    out = ms[0]
    for m in ms[1:]:
        out = out.kron(m)
    return out


def mat_product(ms: Sequence[Matrix], d: int | None = None) -> Matrix:
    if not ms:
        return identity(d)
    out = ms[0]
    for m in ms[1:]:
        out = out @ m
    return out


def scalar_matrix(c, d: int) -> Matrix:
    return identity(d).scalar_mul(c)


def gr_from_json(doc, context: str) -> GaussianRational:
    if not isinstance(doc, dict) or "re" not in doc or "im" not in doc:
        raise ParseError("entry needs 're' and 'im'", code="malformed", context=context)
    return GaussianRational(parse_fraction(doc["re"], context), parse_fraction(doc["im"], context))


def matrix_from_json(doc, context: str = "matrix") -> Matrix:
    if not isinstance(doc, dict) or "dim" not in doc or "rows" not in doc:
        raise ParseError("matrix needs 'dim' and 'rows'", code="malformed", context=context)
    d, rows = doc["dim"], doc["rows"]
    if not isinstance(d, int) or d < 1:
        raise ParseError("matrix dimension must be a positive integer", code="invalid_value", context=context)
    if not isinstance(rows, list) or len(rows) != d or any(not isinstance(r, list) or len(r) != d for r in rows):
        raise ParseError(f"matrix rows do not form a {d}x{d} array", code="arity_mismatch", context=context)
    return Matrix._raw(tuple(tuple(gr_from_json(x, f"{context}.rows[{i}][{j}]") for j, x in enumerate(r))
                             for i, r in enumerate(rows)))


# ---------------------------------------------------------------- polynomials at operators

def _check_commuting(ops: Sequence[Matrix]) -> None:
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            if ops[i] is not ops[j] and not ops[i].commutes(ops[j]):
                raise PredicateError(f"operators {i + 1} and {j + 1} do not commute", code="non_commuting")


def eval_poly_at(p: MultilinearPoly, ops: Sequence[Matrix], dim: int | None = None) -> Matrix:
    """sum_S p(S) prod_{i in S} ops_i for pairwise commuting ops (empty product = I)."""
    if len(ops) != p.nvars:
        raise ValueError(f"polynomial has {p.nvars} variables, got {len(ops)} operators")
    dims = {m.dim for m in ops}
    if dim is not None:
        dims.add(dim)
    if len(dims) > 1:
        raise ValueError(f"operators have different dimensions {sorted(dims)}")
    if not dims:
        raise ValueError("dimension unknown for a polynomial in zero variables")
    d = dims.pop()
    _check_commuting(ops)
    cache: dict[int, Matrix] = {0: identity(d)}

    def prod(mask: int) -> Matrix:
        if mask not in cache:
            low = mask & -mask
            cache[mask] = prod(mask ^ low) @ ops[low.bit_length() - 1]
        return cache[mask]

    total = zero(d)
    for mask, c in p.coeffs.items():
        total = total + prod(mask).scalar_mul(c)
    return total


# ---------------------------------------------------------------- operator assignments

@dataclass(frozen=True)
class OperatorAssignment:
    dim: int
    assign: Mapping[str, Matrix]

    def __init__(self, dim: int, assign: Mapping[str, Matrix]):
        if dim < 1:
            raise ValueError("dimension must be positive")
        for name, m in assign.items():
            if not isinstance(m, Matrix):
                raise TypeError(f"value for {name!r} is not a Matrix")
            if m.dim != dim:
                raise ValueError(f"matrix for {name!r} has dimension {m.dim}, expected {dim}")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "assign", MappingProxyType(dict(assign)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, OperatorAssignment):
            return NotImplemented
        return self.dim == other.dim and dict(self.assign) == dict(other.assign)

    def __hash__(self):
        return hash((self.dim, frozenset(self.assign.items())))

    def __getitem__(self, name: str) -> Matrix:
        return self.assign[name]

    def __contains__(self, name) -> bool:
        return name in self.assign

    def value(self, entry: ScopeEntry) -> Matrix:
        if is_const(entry):
            return scalar_matrix(entry, self.dim)
        return self.assign[entry]

    def restrict(self, names: Iterable[str]) -> "OperatorAssignment":
        return OperatorAssignment(self.dim, {n: self.assign[n] for n in names})

    def extend(self, more: Mapping[str, Matrix]) -> "OperatorAssignment":
        merged = dict(self.assign)
        merged.update(more)
        return OperatorAssignment(self.dim, merged)

    @classmethod
    def from_boolean(cls, a: Mapping[str, int]) -> "OperatorAssignment":
        return cls(1, {v: Matrix([[x]]) for v, x in a.items()})

    def to_json(self) -> dict:
        return {"dim": self.dim, "assign": {n: m.to_json() for n, m in self.assign.items()}}


def assignment_from_json(doc, context: str = "operators") -> OperatorAssignment:
    if not isinstance(doc, dict) or "dim" not in doc or "assign" not in doc:
        raise ParseError("operator assignment needs 'dim' and 'assign'", code="malformed", context=context)
    if not isinstance(doc["assign"], dict):
        raise ParseError("'assign' must be an object", code="malformed", context=context)
    ms = {n: matrix_from_json(m, f"{context}.assign.{n}") for n, m in doc["assign"].items()}
    d = doc["dim"]
    for n, m in ms.items():
        if m.dim != d:
            raise ParseError(f"matrix for {n!r} has dimension {m.dim}, expected {d}",
                             code="arity_mismatch", context=f"{context}.assign.{n}")
    return OperatorAssignment(d, ms)


def parse_assignment(text: str) -> OperatorAssignment:
    return assignment_from_json(load_json(text))


@dataclass
class ValidationReport:
    non_hermitian: list[str]
    non_involution: list[str]
    non_commuting: list[tuple[int, str, str]]  # (constraint index, u, v)

    @property
    def ok(self) -> bool:
        return not (self.non_hermitian or self.non_involution or self.non_commuting)

    def to_json(self) -> dict:
        return {
            "valid": self.ok,
            "non_hermitian": list(self.non_hermitian),
            "non_involution": list(self.non_involution),
            "non_commuting": [{"constraint": i, "pair": [u, v]} for i, u, v in self.non_commuting],
        }


def validate_assignment(f: OperatorAssignment, inst: Instance) -> ValidationReport:
    missing = [v for v in inst.variables if v not in f]
    if missing:
        raise InputError(f"operator assignment misses variables {missing}", code="missing_variable")
    herm, inv, nonc = [], [], []
    for v in inst.variables:
        m = f[v]
        if not m.is_hermitian():
            herm.append(v)
        if not m.is_involution():
            inv.append(v)
    pair_ok: dict[frozenset, bool] = {}
    for i, (_, scope) in enumerate(inst.constraints):
        vs = list(dict.fromkeys(e for e in scope if not is_const(e)))
        for a in range(len(vs)):
            for b in range(a + 1, len(vs)):
                key = frozenset((vs[a], vs[b]))
                if key not in pair_ok:
                    pair_ok[key] = f[vs[a]].commutes(f[vs[b]])
                if not pair_ok[key]:
                    nonc.append((i, vs[a], vs[b]))
    return ValidationReport(herm, inv, nonc)


@lru_cache(maxsize=256)
def cached_indicator(rel: BooleanRelation) -> MultilinearPoly:
    return indicator_poly(rel)


def constraint_satisfied(f: OperatorAssignment, rel: BooleanRelation, scope: Sequence[ScopeEntry]) -> bool:
    ops = [f.value(e) for e in scope]
    return eval_poly_at(cached_indicator(rel), ops) == scalar_matrix(-1, f.dim)


def operator_value(f: OperatorAssignment, inst: Instance) -> Fraction:
    """Fraction of constraints with P_R(f(Z)) == -I; the assignment must validate first."""
    report = validate_assignment(f, inst)
    if not report.ok:
        raise VerificationError("operator assignment is not valid for this instance", code="invalid_assignment")
    if not inst.constraints:
        return Fraction(1)
    sat = sum(1 for rel, scope in inst.constraints if constraint_satisfied(f, inst.language[rel], scope))
    return Fraction(sat, len(inst.constraints))


__all__ = [
    "GaussianRational", "G", "ZERO", "ONE", "I_UNIT", "Matrix", "identity", "zero", "diag", "kron",
    "mat_product", "scalar_matrix", "matrix_from_json", "gr_from_json", "eval_poly_at",
    "OperatorAssignment", "assignment_from_json", "parse_assignment", "ValidationReport",
    "validate_assignment", "operator_value", "constraint_satisfied", "cached_indicator",
]
