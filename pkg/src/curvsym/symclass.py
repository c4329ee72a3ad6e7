"""The class S_n of (0,5)-tensors carrying the algebraic symmetries of a
covariant derivative of curvature.

A tensor ``S`` is in the class when it is antisymmetric in slots (1,2),
symmetric under exchange of the pairs (1,2) and (3,4), and both cyclic sums
over slots (1,2,3) and (3,4,5) vanish.  These four conditions are encoded as
residual operators whose common kernel is S_n.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from gmpy2 import mpq

from . import linalg
from .perm import ID5, PermOperator, cyclic_sum, op_apply, transposition
from .tensor import (
    FLOAT,
    RATIONAL,
    DenseTensor,
    StructureError,
    inf_norm,
    linear_combine,
    tensor_new,
    to_float,
)

MIN_DIM, MAX_DIM = 2, 6
CONSTRAINT_NAMES = ("antisym12", "pair_swap", "bianchi123", "bianchi345")


@dataclass(frozen=True)
class SymmetryClassBasis:
    dim: int
    basis: tuple[DenseTensor, ...]
    provenance: str = "constraint-nullspace"
    sparse: tuple[dict, ...] = field(default=(), repr=False, compare=False)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def __iter__(self):
        return iter(self.basis)

    def __len__(self) -> int:
        return len(self.basis)


def constraint_operators() -> list[PermOperator]:
    """Residual operators C1..C4; S_n is the intersection of their kernels."""
    return [
        PermOperator({ID5: 1, transposition(0, 1): 1}),
        PermOperator({ID5: 1, (2, 3, 0, 1, 4): -1}),
        cyclic_sum(0, 1, 2),
        cyclic_sum(2, 3, 4),
    ]


def _check_dim(n: int) -> None:
    if not (MIN_DIM <= n <= MAX_DIM):
        raise StructureError(f"symmetry class dimension n must be in {MIN_DIM}..{MAX_DIM}, got {n}")


def slot_index_map(n: int, sigma) -> np.ndarray:
    """Flat input offset read by each output component of ``permute(., sigma)``."""
    idx = np.arange(n**5, dtype=np.int64).reshape((n,) * 5)
    return np.transpose(idx, sigma).ravel()


def operator_rows(P: PermOperator, n: int) -> list[dict]:
    """Sparse matrix rows of ``P`` acting on flattened (0,5)-tensors."""
    maps = [(slot_index_map(n, s).tolist(), c) for s, c in P.items()]
    rows = []
    for J in range(n**5):
        row: dict = {}
        for m, c in maps:
            col = m[J]
            v = row.get(col, 0) + c
            if v:
                row[col] = v
            else:
                row.pop(col, None)
        if row:
            rows.append(row)
    return rows


def constraint_rows(n: int) -> list[dict]:
    seen = set()
    rows = []
    for C in constraint_operators():
        for row in operator_rows(C, n):
            key = tuple(sorted(row.items()))
            if key not in seen:
                seen.add(key)
                rows.append(row)
    return rows


def sparse_to_tensor(vec: dict, n: int) -> DenseTensor:
    return tensor_new(n, 5, linalg.sparse_to_dense(vec, n**5))


@lru_cache(maxsize=None)
def symmetry_basis(n: int) -> SymmetryClassBasis:
    """Canonical exact basis of S_n from the stacked constraint system."""
    _check_dim(n)
    kernel = linalg.nullspace_sparse(constraint_rows(n), n**5)
    return SymmetryClassBasis(
        dim=n,
        basis=tuple(sparse_to_tensor(v, n) for v in kernel),
        sparse=tuple(kernel),
    )


def residuals(T: DenseTensor) -> list:
    """The four constraint residual tensors ``C_i(T)``."""
    if T.rank != 5:
        raise StructureError(f"symmetry class membership needs rank 5, got {T.rank}")
    return [op_apply(C, T) for C in constraint_operators()]


def is_in_class(T: DenseTensor) -> dict:
    """Infinity norms of the four residuals, keyed by constraint name."""
    return dict(zip(CONSTRAINT_NAMES, (inf_norm(r) for r in residuals(T))))


def in_class(T: DenseTensor) -> bool:
    return all(v == 0 for v in is_in_class(T).values())


def project_to_class(T: DenseTensor, basis: SymmetryClassBasis) -> DenseTensor:
    """Orthogonal projection onto span(basis) in the componentwise inner product."""
    if T.rank != 5 or T.dim != basis.dim:
        raise StructureError(f"cannot project {T!r} onto the class for n={basis.dim}")
    if basis.dimension == 0:
        return linear_combine([0], [T])
    if T.kind == FLOAT:
        B = np.array([to_float(b).flat() for b in basis.basis])
        coef, *_ = np.linalg.lstsq(B.T, T.flat(), rcond=None)
        return DenseTensor(T.dim, 5, FLOAT, (coef @ B).reshape(T.shape))
    vecs = basis.sparse or tuple(
        {c: v for c, v in enumerate(b.flat()) if v != 0} for b in basis.basis
    )
    t = T.flat()
    k = len(vecs)
    rows = []
    rhs = []
    for a in range(k):
        va = vecs[a]
        rows.append({b: _sparse_dot(va, vecs[b]) for b in range(k)})
        rhs.append(sum((v * t[c] for c, v in va.items()), mpq(0)))
    sol, kern = linalg.solve_sparse(rows, rhs, k)
    if sol is None or kern:
        raise RuntimeError("Gram matrix of the class basis is singular")
    coeffs = [sol.get(a, mpq(0)) for a in range(k)]
    return linear_combine(coeffs, list(basis.basis))


def _sparse_dot(a: dict, b: dict) -> mpq:
    if len(a) > len(b):
        a, b = b, a
    return sum((v * b[c] for c, v in a.items() if c in b), mpq(0))


def random_class_element(basis: SymmetryClassBasis, rng: np.random.Generator, lo: int = -3, hi: int = 3) -> DenseTensor:
    """Random integer combination of basis tensors (never all-zero coefficients)."""
    while True:
        coeffs = [int(c) for c in rng.integers(lo, hi + 1, size=basis.dimension)]
        if any(coeffs):
            return linear_combine(coeffs, list(basis.basis))


def flatten_rational(T: DenseTensor) -> dict:
    if T.kind != RATIONAL:
        raise StructureError("exact flattening needs a rational tensor")
    return {c: v for c, v in enumerate(T.flat()) if v != 0}
