"""Exact simultaneous diagonalization of commuting Hermitian involutions.

The change of basis C has pairwise orthogonal but unnormalized columns, so
C^{-1} = D0^{-1} C* with D0 = C* C diagonal and everything stays in Q(i).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import PredicateError
from .matrix import ONE, ZERO, GaussianRational, Matrix, diag, matrix_from_json
from .model import load_json

Vector = list[GaussianRational]


@dataclass(frozen=True)
class JointEigenDecomposition:
    C: Matrix
    diags: tuple[tuple[int, ...], ...]
    blocks: tuple[tuple[int, ...], ...]

    def to_json(self) -> dict:
        doc = self.C.to_json()
        doc["diags"] = [list(d) for d in self.diags]
        doc["blocks"] = [list(b) for b in self.blocks]
        return doc


def nullspace(rows: Sequence[Sequence[GaussianRational]], ncols: int) -> list[Vector]:
    """Basis of {c : M c = 0}, one vector per free column of the reduced echelon form."""
    a = [list(r) for r in rows]
    pivots: list[int] = []
    rank = 0
    for col in range(ncols):
        piv = next((k for k in range(rank, len(a)) if a[k][col]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = ONE / a[rank][col]
        a[rank] = [x * inv for x in a[rank]]
        for k in range(len(a)):
            if k != rank and a[k][col]:
                f = a[k][col]
                a[k] = [x - f * y for x, y in zip(a[k], a[rank])]
        pivots.append(col)
        rank += 1
        if rank == len(a):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [ZERO] * ncols
        v[fc] = ONE
        for r, pc in enumerate(pivots):
            v[pc] = -a[r][fc]
        basis.append(v)
    return basis


def _apply(m: Matrix, v: Vector) -> Vector:
    return [sum((x * y for x, y in zip(row, v) if x and y), ZERO) for row in m.rows]


def _inner(u: Vector, v: Vector) -> GaussianRational:
    return sum((x.conjugate() * y for x, y in zip(u, v) if x and y), ZERO)


def _normalize_lead(v: Vector) -> Vector:
    lead = next(x for x in v if x)
    if lead == 1:
        return v
    inv = ONE / lead
    return [x * inv for x in v]


def _split(a: Matrix, basis: list[Vector], eig: int) -> list[Vector]:
    """Basis of the eig-eigenspace of a inside span(basis)."""
    images = [_apply(a, b) for b in basis]
    d = a.dim
    k = len(basis)
    # matrix (A - eig) V as d x k
    rows = [[images[j][i] - basis[j][i] * eig for j in range(k)] for i in range(d)]
    out = []
    for c in nullspace(rows, k):
        v = [sum((cj * b[i] for cj, b in zip(c, basis) if cj), ZERO) for i in range(d)]
        out.append(_normalize_lead(v))
    return out


def gram(vectors: list[Vector]) -> list[Vector]:
    """Gram process without normalization."""
    out: list[Vector] = []
    norms: list[GaussianRational] = []
    for v in vectors:
        w = list(v)
        for u, n in zip(out, norms):
            c = _inner(u, w) / n
            if c:
                w = [x - c * y for x, y in zip(w, u)]
        out.append(w)
        norms.append(_inner(w, w))
    return out


def check_commuting_involutions(ops: Sequence[Matrix]) -> int:
    dims = {m.dim for m in ops}
    if len(dims) > 1:
        raise PredicateError(f"operators have different dimensions {sorted(dims)}", code="dim_mismatch")
    for i, m in enumerate(ops):
        if not m.is_hermitian():
            raise PredicateError(f"operator {i} is not Hermitian", code="non_hermitian")
        if not m.is_involution():
            raise PredicateError(f"operator {i} is not an involution", code="non_involution")
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            if not ops[i].commutes(ops[j]):
                raise PredicateError(f"operators {i} and {j} do not commute", code="non_commuting")
    return dims.pop() if dims else 0


def joint_eigen(ops: Sequence[Matrix], dim: int | None = None) -> JointEigenDecomposition:
    """Simultaneous eigenbasis of pairwise commuting Hermitian involutions.

    Subspaces are split by the +1 eigenspace first, then -1; the final
    eigenspaces are orthogonalized.  ``dim`` is required when ops is empty.
    """
    d = check_commuting_involutions(ops) or dim
    if not d:
        raise ValueError("dimension unknown for an empty operator list")
    if dim is not None and d != dim:
        raise PredicateError(f"operators have dimension {d}, expected {dim}", code="dim_mismatch")
    std = [[ONE if i == j else ZERO for i in range(d)] for j in range(d)]
    parts: list[tuple[tuple[int, ...], list[Vector]]] = [((), std)]
    for a in ops:
        refined = []
        for sig, basis in parts:
            got = 0
            for eig in (1, -1):
                sub = _split(a, basis, eig)
                if sub:
                    refined.append((sig + (eig,), sub))
                    got += len(sub)
            if got != len(basis):
                raise PredicateError("operator does not preserve a joint eigenspace", code="non_commuting")
        parts = refined
    columns: list[Vector] = []
    blocks = []
    sigs = []
    for sig, basis in parts:
        start = len(columns)
        columns.extend(gram(basis))
        blocks.append(tuple(range(start, len(columns))))
        sigs.extend([sig] * len(basis))
    C = Matrix(tuple(tuple(columns[j][i] for j in range(d)) for i in range(d)))
    diags = tuple(tuple(s[k] for s in sigs) for k in range(len(ops)))
    return JointEigenDecomposition(C, diags, tuple(blocks))


def _gram_diag(C: Matrix) -> list[GaussianRational]:
    g = C.H @ C
    if not g.is_diagonal():
        raise PredicateError("columns of C are not pairwise orthogonal", code="non_orthogonal")
    dvals = g.diagonal()
    if any(not x for x in dvals):
        raise PredicateError("C is not invertible", code="singular")
    return dvals


def inverse_of(C: Matrix) -> Matrix:
    """C^{-1} = D0^{-1} C* for C with orthogonal columns."""
    d0 = _gram_diag(C)
    return diag([ONE / x for x in d0]) @ C.H


def conjugate(C: Matrix, M: Matrix) -> Matrix:
    """C^{-1} M C."""
    return inverse_of(C) @ M @ C


def inverse_conjugate(C: Matrix, D: Matrix) -> Matrix:
    """C D C^{-1}, computed as C D D0^{-1} C*."""
    d0 = _gram_diag(C)
    return C @ D @ diag([ONE / x for x in d0]) @ C.H


def reconstruct(dec: JointEigenDecomposition, i: int) -> Matrix:
    return inverse_conjugate(dec.C, diag(dec.diags[i]))


def decomposition_from_json(doc) -> JointEigenDecomposition:
    C = matrix_from_json(doc, "decomposition")
    return JointEigenDecomposition(C, tuple(tuple(d) for d in doc.get("diags", [])),
                                   tuple(tuple(b) for b in doc.get("blocks", [])))


def parse_decomposition(text: str) -> JointEigenDecomposition:
    return decomposition_from_json(load_json(text))


__all__ = [
    "JointEigenDecomposition", "joint_eigen", "conjugate", "inverse_conjugate", "inverse_of",
    "reconstruct", "nullspace", "gram", "check_commuting_involutions", "decomposition_from_json",
    "parse_decomposition",
]
