"""Multilinear (Fourier) representation of functions on {-1,+1}^n.

A subset S of [n] = {1..n} is stored as a bitmask with bit i-1 standing for
variable i.  Coefficients are exact fractions and zero terms are dropped.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Callable, Iterable, Mapping, Sequence

from .errors import CapExceeded, ParseError
from .model import BooleanRelation, cube, load_json

MAX_VARS = 64


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << (i - 1)
    return m


def indices_of(mask: int) -> list[int]:
    out, i = [], 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def _point_bits(a: Sequence[int]) -> int:
    """Bitmask of the coordinates equal to -1."""
    m = 0
    for i, v in enumerate(a):
        if v == -1:
            m |= 1 << i
    return m


def fmt_fraction(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_fraction(text, context: str = "") -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise ParseError(f"expected a fraction string, got {text!r}", code="invalid_value", context=context)
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad fraction {text!r}", code="invalid_value", context=context) from None


@dataclass(frozen=True)
class MultilinearPoly:
    nvars: int
    coeffs: Mapping[int, Fraction]

    def __init__(self, nvars: int, coeffs: Mapping[int, object] | None = None):
        if nvars < 0:
            raise ValueError("nvars must be non-negative")
        if nvars > MAX_VARS:
            raise CapExceeded(f"polynomials are limited to {MAX_VARS} variables, got {nvars}")
        clean = {}
        for mask, c in sorted((coeffs or {}).items()):
            if mask < 0 or mask >> nvars:
                raise ValueError(f"monomial {mask:b} uses variables beyond {nvars}")
            c = Fraction(c)
            if c:
                clean[mask] = c
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "coeffs", MappingProxyType(clean))

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultilinearPoly):
            return NotImplemented
        return self.nvars == other.nvars and dict(self.coeffs) == dict(other.coeffs)

    def __hash__(self):
        return hash((self.nvars, frozenset(self.coeffs.items())))

    def __repr__(self) -> str:
        if not self.coeffs:
            return f"MultilinearPoly({self.nvars}, 0)"
        terms = []
        for mask, c in self.coeffs.items():
            mono = "*".join(f"X{i}" for i in indices_of(mask)) or "1"
            terms.append(f"{c}*{mono}")
        return f"MultilinearPoly({self.nvars}, {' + '.join(terms)})"

    def coefficient(self, subset: Iterable[int] | int) -> Fraction:
        mask = subset if isinstance(subset, int) else mask_of(subset)
        return self.coeffs.get(mask, Fraction(0))

    def __add__(self, other: "MultilinearPoly") -> "MultilinearPoly":
        _same_n(self, other)
        out = dict(self.coeffs)
        for mask, c in other.coeffs.items():
            out[mask] = out.get(mask, 0) + c
        return MultilinearPoly(self.nvars, out)

    def __neg__(self) -> "MultilinearPoly":
        return MultilinearPoly(self.nvars, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other: "MultilinearPoly") -> "MultilinearPoly":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, MultilinearPoly):
            return multiply(self, other)
        return MultilinearPoly(self.nvars, {m: c * other for m, c in self.coeffs.items()})

    __rmul__ = __mul__

    @classmethod
    def constant(cls, nvars: int, c) -> "MultilinearPoly":
        return cls(nvars, {0: c})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "MultilinearPoly":
        return cls(nvars, {1 << (i - 1): 1})

    def to_json(self) -> dict:
        return {
            "nvars": self.nvars,
            "terms": [{"vars": indices_of(m), "coef": fmt_fraction(c)} for m, c in self.coeffs.items()],
        }


def _same_n(p: MultilinearPoly, q: MultilinearPoly) -> None:
    if p.nvars != q.nvars:
        raise ValueError(f"nvars mismatch: {p.nvars} vs {q.nvars}")


def poly_from_json(doc) -> MultilinearPoly:
    if not isinstance(doc, dict) or "nvars" not in doc or "terms" not in doc:
        raise ParseError("polynomial needs 'nvars' and 'terms'", code="malformed", context="$")
    n = doc["nvars"]
    coeffs: dict[int, Fraction] = {}
    for k, term in enumerate(doc["terms"]):
        ctx = f"terms[{k}]"
        if not isinstance(term, dict) or "vars" not in term or "coef" not in term:
            raise ParseError("term needs 'vars' and 'coef'", code="malformed", context=ctx)
        vs = term["vars"]
        if any((not isinstance(i, int)) or i < 1 or i > n for i in vs) or len(set(vs)) != len(vs):
            raise ParseError(f"bad variable list {vs!r}", code="invalid_value", context=ctx)
        mask = mask_of(vs)
        coeffs[mask] = coeffs.get(mask, 0) + parse_fraction(term["coef"], ctx)
    return MultilinearPoly(n, coeffs)


def parse_poly(text: str) -> MultilinearPoly:
    return poly_from_json(load_json(text))


def transform(table: Mapping[tuple, object] | Callable[..., object], nvars: int | None = None) -> MultilinearPoly:
    """Fourier coefficients of a function given by a total truth table.

    ``table`` maps each point of {-1,+1}^n to a rational; a callable taking
    the n coordinates is accepted when ``nvars`` is given.
    """
    if callable(table) and not isinstance(table, Mapping):
        if nvars is None:
            raise ValueError("nvars is required when the table is a callable")
        fn = table
        table = {a: fn(*a) for a in cube(nvars)}
    if nvars is None:
        lengths = {len(k) for k in table}
        if len(lengths) > 1:
            raise ValueError("truth table keys have different lengths")
        nvars = lengths.pop() if lengths else 0
    if nvars > MAX_VARS:
        raise CapExceeded(f"polynomials are limited to {MAX_VARS} variables")
    size = 1 << nvars
    vals: list[Fraction | None] = [None] * size
    for a, v in table.items():
        a = tuple(a)
        if len(a) != nvars or any(x not in (-1, 1) for x in a):
            raise ValueError(f"bad table point {a}")
        vals[_point_bits(a)] = Fraction(v)
    if any(v is None for v in vals):
        raise ValueError("truth table is partial")
    # in-place Walsh-Hadamard butterflies
    h = 1
    while h < size:
        for start in range(0, size, 2 * h):
            for j in range(start, start + h):
                x, y = vals[j], vals[j + h]
                vals[j], vals[j + h] = x + y, x - y
        h *= 2
    scale = Fraction(1, size)
    return MultilinearPoly(nvars, {mask: c * scale for mask, c in enumerate(vals) if c})


def evaluate(p: MultilinearPoly, a: Sequence) -> Fraction:
    if len(a) != p.nvars:
        raise ValueError(f"point has length {len(a)}, polynomial has {p.nvars} variables")
    total = Fraction(0)
    for mask, c in p.coeffs.items():
        term = c
        i = 0
        while mask:
            if mask & 1:
                term *= a[i]
            mask >>= 1
            i += 1
        total += term
    return total


def multiply(p: MultilinearPoly, q: MultilinearPoly) -> MultilinearPoly:
    """Product reduced by X_i^2 = 1: coefficient at S is sum_T p(T) q(S xor T)."""
    _same_n(p, q)
    out: dict[int, Fraction] = {}
    for s, a in p.coeffs.items():
        for t, b in q.coeffs.items():
            k = s ^ t
            out[k] = out.get(k, 0) + a * b
    return MultilinearPoly(p.nvars, out)


def indicator_poly(rel: BooleanRelation) -> MultilinearPoly:
    """Polynomial of the function that is -1 on ``rel`` and +1 off it."""
    return transform({a: (-1 if a in rel else 1) for a in cube(rel.arity)}, rel.arity)


def clause_poly(literals: Sequence[tuple[int, int]], nvars: int | None = None) -> MultilinearPoly:
    """2^(1-r) * prod(1 + sg_i X_i) - 1 for a clause on distinct (1-based) variables."""
    idx = [i for i, _ in literals]
    if len(set(idx)) != len(idx):
        raise ValueError("clause_poly needs distinct variable indices")
    if any(i < 1 for i in idx):
        raise ValueError("variable indices are 1-based")
    if any(s not in (-1, 1) for _, s in literals):
        raise ValueError("literal signs must be +1 or -1")
    n = nvars if nvars is not None else max(idx, default=0)
    prod = MultilinearPoly.constant(n, 1)
    for i, s in literals:
        prod = multiply(prod, MultilinearPoly(n, {0: 1, 1 << (i - 1): s}))
    r = len(literals)
    return prod * Fraction(2) ** (1 - r) - MultilinearPoly.constant(n, 1)


__all__ = [
    "MultilinearPoly", "transform", "evaluate", "multiply", "indicator_poly", "clause_poly",
    "mask_of", "indices_of", "fmt_fraction", "parse_fraction", "poly_from_json", "parse_poly",
    "MAX_VARS",
]
