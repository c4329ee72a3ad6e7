"""Independent oracles used to produce and re-check the golden files.

Nothing here shares code with the main computational paths: index actions
are written out by hand, exact linear algebra goes through sympy's
``DomainMatrix`` and the curvature oracle differentiates symbolically.
"""
from __future__ import annotations

import hashlib
import json
from itertools import permutations

import sympy as sp
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix


# -- dimension of the symmetry class via projector images ------------------

def _antisym12(I):
    i, j, k, l, m = I
    return [(I, QQ(1, 2)), ((j, i, k, l, m), QQ(-1, 2))]


def _pair_sym(I):
    i, j, k, l, m = I
    return [(I, QQ(1, 2)), ((k, l, i, j, m), QQ(1, 2))]


def _bianchi_free_123(I):
    # identity minus a third of the cyclic sum over the first three slots
    i, j, k, l, m = I
    third = QQ(1, 3)
    return [(I, 1 - third), ((j, k, i, l, m), -third), ((k, i, j, l, m), -third)]


def _bianchi_free_345(I):
    i, j, k, l, m = I
    third = QQ(1, 3)
    return [(I, 1 - third), ((i, j, l, m, k), -third), ((i, j, m, k, l), -third)]


PROJECTORS = (_antisym12, _pair_sym, _bianchi_free_123, _bianchi_free_345)


def _block_dimension(multiset: tuple) -> int:
    """dim of S_n restricted to tensors supported on rearrangements of ``multiset``."""
    idx = sorted(set(permutations(multiset)))
    pos = {I: a for a, I in enumerate(idx)}
    N = len(idx)
    # W: columns span the current subspace (start: whole block)
    W = DomainMatrix.eye(N, QQ)
    for proj in PROJECTORS:
        # matrix of (Id - P) on the block; its kernel is the image of P
        rows = [[QQ(0)] * N for _ in range(N)]
        for I in idx:
            col = pos[I]
            rows[col][col] += 1
            for J, c in proj(I):
                rows[pos[J]][col] -= c
        M = DomainMatrix(rows, (N, N), QQ)
        if W.shape[1] == 0:
            return 0
        K = (M * W).nullspace()  # rows are kernel vectors in W-coordinates
        if K.shape[0] == 0:
            return 0
        W = W * K.transpose()
    return W.shape[1]


def _multisets(n: int, k: int = 5):
    def rec(start, left):
        if left == 0:
            yield ()
            return
        for i in range(start, n):
            for rest in rec(i, left - 1):
                yield (i,) + rest
    return list(rec(0, k))


def projector_image_dimension(n: int) -> tuple[int, dict]:
    """Dimension of S_n as a sum over index-content blocks.

    Returns the total and the per-block dimensions keyed by multiset string.
    """
    blocks = {}
    cache: dict = {}
    for ms in _multisets(n):
        # block dimension depends only on the multiplicity pattern
        pattern = tuple(sorted((ms.count(v) for v in set(ms)), reverse=True))
        if pattern not in cache:
            canon = tuple(v for v, c in enumerate(pattern) for _ in range(c))
            cache[pattern] = _block_dimension(canon)
        blocks["".join(map(str, ms))] = cache[pattern]
    return sum(blocks.values()), blocks


def digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()


# -- symbolic covariant derivative of curvature ----------------------------

def symbolic_nabla_R(metric_diag, coords, point):
    """Exact R_{ijkl;m} at ``point`` for a diagonal metric given symbolically.

    Uses R^i_{jkl} = d_k G^i_{lj} - d_l G^i_{kj} + G^i_{kp} G^p_{lj} - G^i_{lp} G^p_{kj}
    and R_{ijkl} = g_{ip} R^p_{jkl}.  Returns a nested list of sympy Rationals
    indexed [i][j][k][l][m].
    """
    n = len(coords)
    g = sp.diag(*metric_diag)
    ginv = g.inv()
    Gam = [[[sp.simplify(sum(ginv[i, p] * (sp.diff(g[p, k], coords[j]) + sp.diff(g[p, j], coords[k]) - sp.diff(g[j, k], coords[p])) for p in range(n)) / 2)
             for k in range(n)] for j in range(n)] for i in range(n)]
    Rup = {}
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    expr = sp.diff(Gam[i][l][j], coords[k]) - sp.diff(Gam[i][k][j], coords[l])
                    expr += sum(Gam[i][k][p] * Gam[p][l][j] - Gam[i][l][p] * Gam[p][k][j] for p in range(n))
                    Rup[i, j, k, l] = expr
    R = {}
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    R[i, j, k, l] = sp.expand(sum(g[i, p] * Rup[p, j, k, l] for p in range(n)))
    subs = dict(zip(coords, point))
    out = [[[[[None] * n for _ in range(n)] for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    for m in range(n):
                        expr = sp.diff(R[i, j, k, l], coords[m])
                        for p in range(n):
                            expr -= Gam[p][m][i] * R[p, j, k, l]
                            expr -= Gam[p][m][j] * R[i, p, k, l]
                            expr -= Gam[p][m][k] * R[i, j, p, l]
                            expr -= Gam[p][m][l] * R[i, j, k, p]
                        out[i][j][k][l][m] = sp.nsimplify(sp.simplify(expr.subs(subs)))
    return out


def perturbed_flat_nabla_R(n: int, eps, point):
    xs = sp.symbols(f"x0:{n}")
    eps = sp.Rational(eps)
    diag = [1 + eps * xs[0] ** 2] * n
    return symbolic_nabla_R(diag, xs, [sp.Rational(p) for p in point])
