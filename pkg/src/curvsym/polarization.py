"""Polarization of the quintic form S(U, V, U, V, U).

Substituting U -> U + tX + sY and V -> V + rZ and reading off the
coefficient of t*s*r yields a six-term multilinear identity in
(U, V, X, Y, Z).  The coefficient is computed two ways: by placing X, Y, Z
into the slots directly (12 terms) and by exact polynomial interpolation of
sampled quintic values.
"""
from __future__ import annotations

from itertools import permutations, product
from typing import Sequence

import numpy as np
from gmpy2 import mpq

from . import linalg
from .report import EXACT_FAIL, EXACT_PASS, VerdictReport
from .symclass import random_class_element, symmetry_basis
from .tensor import FLOAT, DenseTensor, StructureError, tensor_new, to_rational

U_SLOTS = (0, 2, 4)
V_SLOTS = (1, 3)
DEFAULT_SEED = 20240917


def as_vector(v, n: int, kind: str) -> np.ndarray:
    if len(v) != n:
        raise StructureError(f"vector of length {len(v)} does not match dim {n}")
    if kind == FLOAT:
        return np.array([float(x) for x in v])
    out = np.empty(n, dtype=object)
    out[:] = [to_rational(x) for x in v]
    return out


def eval_form(S: DenseTensor, *vectors):
    """Full contraction sum S[i,j,k,l,m] v1[i] v2[j] v3[k] v4[l] v5[m]."""
    if S.rank != 5 or len(vectors) != 5:
        raise StructureError("eval_form needs a rank-5 tensor and five vectors")
    acc = S.data
    for v in reversed(vectors):
        acc = np.dot(acc, as_vector(v, S.dim, S.kind))
    return acc.item() if hasattr(acc, "item") and S.kind == FLOAT else acc


def quintic_form(S: DenseTensor, U, V):
    return eval_form(S, U, V, U, V, U)


def _tsr_expansion(S, U, V, X, Y, Z):
    total = 0
    for x_slot, y_slot in permutations(U_SLOTS, 2):
        (u_slot,) = set(U_SLOTS) - {x_slot, y_slot}
        for z_slot in V_SLOTS:
            (v_slot,) = set(V_SLOTS) - {z_slot}
            args = [None] * 5
            args[x_slot], args[y_slot], args[u_slot] = X, Y, U
            args[z_slot], args[v_slot] = Z, V
            total = total + eval_form(S, *args)
    return total


def _linear_weights(points: Sequence[int]) -> list:
    """w with sum(w_i p(x_i)) = p'(0) for every polynomial p of degree < len(points)."""
    pts = [mpq(x) for x in points]
    weights = []
    for i, xi in enumerate(pts):
        others = [x for j, x in enumerate(pts) if j != i]
        denom = mpq(1)
        for x in others:
            denom *= xi - x
        num = mpq(0)
        for k in range(len(others)):
            term = mpq(1)
            for j, x in enumerate(others):
                if j != k:
                    term *= -x
            num += term
        weights.append(num / denom)
    return weights


# t and s enter cubically, r quadratically
_T_POINTS = _S_POINTS = (0, 1, 2, 3)
_R_POINTS = (0, 1, 2)


def _tsr_interpolation(S, U, V, X, Y, Z):
    kind = S.kind
    U, V, X, Y, Z = (as_vector(w, S.dim, kind) for w in (U, V, X, Y, Z))
    wt, ws, wr = _linear_weights(_T_POINTS), _linear_weights(_S_POINTS), _linear_weights(_R_POINTS)
    if kind == FLOAT:
        wt, ws, wr = ([float(w) for w in ws_] for ws_ in (wt, ws, wr))
    total = 0
    for (t, a), (s, b), (r, c) in product(zip(_T_POINTS, wt), zip(_S_POINTS, ws), zip(_R_POINTS, wr)):
        total = total + a * b * c * quintic_form(S, U + t * X + s * Y, V + r * Z)
    return total


def tsr_coefficient(S: DenseTensor, U, V, X, Y, Z, route: str = "expansion"):
    """Coefficient of t*s*r in quintic_form(S, U + tX + sY, V + rZ)."""
    if route == "expansion":
        return _tsr_expansion(S, U, V, X, Y, Z)
    if route == "interpolation":
        return _tsr_interpolation(S, U, V, X, Y, Z)
    raise ValueError(f"unknown route {route!r}")


def eq2_lhs(S: DenseTensor, U, V, X, Y, Z):
    """The six-term polarized identity, term by term."""
    return (eval_form(S, X, V, Y, Z, U) + eval_form(S, Y, V, U, Z, X) + eval_form(S, U, V, X, Z, Y)
            + eval_form(S, X, Z, Y, V, U) + eval_form(S, Y, Z, U, V, X) + eval_form(S, U, Z, X, V, Y))


def eq2_coefficient_tensor(S: DenseTensor) -> DenseTensor:
    """E with eq2_lhs(S, U, V, X, Y, Z) = sum E[u,v,x,y,z] U^u V^v X^x Y^y Z^z."""
    n = S.dim
    s = S.data
    out = []
    for u, v, x, y, z in product(range(n), repeat=5):
        out.append(s[x, v, y, z, u] + s[y, v, u, z, x] + s[u, v, x, z, y]
                   + s[x, z, y, v, u] + s[y, z, u, v, x] + s[u, z, x, v, y])
    return tensor_new(n, 5, out, S.kind)


def eq2_kernel(n: int) -> VerdictReport:
    """Dimension of {S in S_n : the six-term identity holds for all vectors}."""
    basis = symmetry_basis(n)
    rows = []
    for b in basis.basis:
        E = eq2_coefficient_tensor(b)
        rows.append({c: v for c, v in enumerate(E.flat()) if v != 0})
    rank = linalg.rank_sparse(rows, n**5)
    kernel_dim = basis.dimension - rank
    derived = {"class_dimension": basis.dimension, "rank": rank, "kernel_dimension": kernel_dim}
    witness = {"kernel_dimension": kernel_dim} if kernel_dim else None
    return VerdictReport("eq2_kernel", n, EXACT_PASS if not kernel_dim else EXACT_FAIL, witness, derived)


def _random_vector(rng, n):
    return [int(v) for v in rng.integers(-3, 4, size=n)]


def proportionality_check(n: int, trials: int = 50, seed: int = DEFAULT_SEED) -> VerdictReport:
    """Find the constant c with tsr_coefficient == c * eq2_lhs on S_n.

    Samples use integer components in -3..3 drawn from a seeded generator.
    Samples where the six-term sum vanishes are skipped unless the tsr
    coefficient is nonzero there (which is a failure).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng([seed, n])
    basis = symmetry_basis(n)
    constant = None
    informative = 0
    witness = None
    for trial in range(trials):
        S = random_class_element(basis, rng)
        U, V, X, Y, Z = (_random_vector(rng, n) for _ in range(5))
        expanded = tsr_coefficient(S, U, V, X, Y, Z)
        interpolated = tsr_coefficient(S, U, V, X, Y, Z, route="interpolation")
        lhs = eq2_lhs(S, U, V, X, Y, Z)
        sample = {"trial": trial, "vectors": {"U": U, "V": V, "X": X, "Y": Y, "Z": Z},
                  "tsr": expanded, "eq2": lhs}
        if expanded != interpolated:
            witness = {**sample, "reason": "expansion and interpolation routes disagree",
                       "interpolated": interpolated}
            break
        if lhs == 0:
            if expanded != 0:
                witness = {**sample, "reason": "six-term sum vanishes but tsr coefficient does not"}
                break
            continue
        informative += 1
        ratio = expanded / lhs
        if constant is None:
            constant = ratio
        elif ratio != constant:
            witness = {**sample, "reason": "inconsistent constant", "ratio": ratio, "constant": constant}
            break
    if witness is None and constant is None:
        witness = {"reason": "no informative sample", "trials": trials}
    derived = {"constant": constant, "informative_samples": informative, "trials": trials, "seed": seed}
    status = EXACT_PASS if witness is None else EXACT_FAIL
    return VerdictReport("polarization_constant", n, status, witness, derived)


def nonvacuity_witness(n: int):
    """First (basis index, U, V, X, Y, Z) of unit vectors with a nonzero six-term sum."""
    basis = symmetry_basis(n)
    for pos, b in enumerate(basis.basis):
        E = eq2_coefficient_tensor(b)
        nz = np.argwhere(E.data != 0)
        if len(nz):
            u, v, x, y, z = (int(a) for a in nz[0])
            unit = lambda a: [1 if i == a else 0 for i in range(n)]  # noqa: E731
            return pos, unit(u), unit(v), unit(x), unit(y), unit(z)
    return None
