"""Exact rational linear algebra on sparse rows.

Rows are dicts ``{column: mpq}``.  Elimination is Gauss-Jordan with the
pivot of each row taken at its *largest* remaining column.  With that
choice the kernel basis read off the reduced system is already the reduced
row echelon form of the kernel: every basis vector has leading entry 1 at
its free column and zeros at all other free columns.  Vectors are returned
sorted by leading column, so output is canonical and independent of row
order.
"""
from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Sequence

from gmpy2 import mpq

from .tensor import StructureError, to_rational

RHS = -1  # column key of the right-hand side in augmented systems


class Reducer:
    """Incremental exact Gauss-Jordan reduction of a sparse row system."""

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivots: dict[int, dict[int, mpq]] = {}
        # column -> pivot columns whose row has a nonzero entry there
        self._users: defaultdict[int, set[int]] = defaultdict(set)
        self.inconsistent = False

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def add(self, row: dict) -> bool:
        """Reduce ``row`` into the system; returns True if the rank grew."""
        r = {c: mpq(v) for c, v in row.items() if v != 0}
        pivots = self.pivots
        for c in [c for c in r if c in pivots]:
            f = r.get(c)
            if not f:
                continue
            for cc, vv in pivots[c].items():
                nv = r.get(cc, 0) - f * vv
                if nv:
                    r[cc] = nv
                else:
                    r.pop(cc, None)
        if not r:
            return False
        p = max(r)
        if p == RHS:
            self.inconsistent = True
            return False
        inv = 1 / r[p]
        if inv != 1:
            r = {c: v * inv for c, v in r.items()}
        # keep earlier pivot rows free of the new pivot column
        for q in list(self._users.get(p, ())):
            prow = pivots[q]
            f = prow.pop(p)
            for cc, vv in r.items():
                if cc == p:
                    continue
                nv = prow.get(cc, 0) - f * vv
                if nv:
                    if cc not in prow:
                        self._users[cc].add(q)
                    prow[cc] = nv
                else:
                    if cc in prow:
                        del prow[cc]
                        self._users[cc].discard(q)
        self._users.pop(p, None)
        pivots[p] = r
        for cc in r:
            if cc != p:
                self._users[cc].add(p)
        return True

    def kernel(self) -> list[dict[int, mpq]]:
        """Canonical sparse kernel basis of the (non-augmented) system."""
        by_free: defaultdict[int, dict[int, mpq]] = defaultdict(dict)
        for p, row in self.pivots.items():
            for c, v in row.items():
                if c != p and c != RHS:
                    by_free[c][p] = -v
        basis = []
        for f in range(self.ncols):
            if f in self.pivots:
                continue
            vec = {f: mpq(1)}
            vec.update(by_free.get(f, {}))
            basis.append(vec)
        return basis

    def particular_solution(self) -> dict[int, mpq] | None:
        """Solution with all free variables zero, or None if inconsistent."""
        if self.inconsistent:
            return None
        return {p: row[RHS] for p, row in self.pivots.items() if RHS in row}


def _dense_to_sparse(rows: Iterable[Sequence]) -> tuple[list[dict], int | None]:
    out, width = [], None
    for i, row in enumerate(rows):
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise StructureError(f"row {i} has length {len(row)}, expected {width}")
        out.append({c: to_rational(v) for c, v in enumerate(row) if v != 0})
    return out, width


def sparse_to_dense(vec: dict, ncols: int) -> list[mpq]:
    dense = [mpq(0)] * ncols
    for c, v in vec.items():
        dense[c] = v
    return dense


def nullspace_sparse(rows: Iterable[dict], ncols: int) -> list[dict[int, mpq]]:
    red = Reducer(ncols)
    for row in rows:
        red.add(row)
    return red.kernel()


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> list[list[mpq]]:
    """Exact canonical kernel basis of the matrix with the given rows.

    Each basis vector has first nonzero entry 1; vectors are ordered by the
    position of that entry.  ``ncols`` is needed only when ``rows`` is empty.
    """
    sparse, width = _dense_to_sparse(rows)
    if width is None:
        if ncols is None:
            raise StructureError("empty system needs an explicit column count")
        width = ncols
    elif ncols is not None and ncols != width:
        raise StructureError(f"rows have length {width}, expected {ncols}")
    return [sparse_to_dense(v, width) for v in nullspace_sparse(sparse, width)]


def rank_sparse(rows: Iterable[dict], ncols: int) -> int:
    red = Reducer(ncols)
    for row in rows:
        red.add(row)
    return red.rank


def rank(rows: Sequence[Sequence]) -> int:
    sparse, width = _dense_to_sparse(rows)
    return rank_sparse(sparse, width or 0)


def solve_sparse(rows: Iterable[dict], rhs: Iterable, ncols: int):
    """Solve ``A x = b`` exactly.

    Returns ``(x, kernel)`` with ``x`` the solution whose free variables are
    zero (dict) and ``kernel`` the canonical homogeneous basis, or
    ``(None, kernel)`` when the system is inconsistent.
    """
    red = Reducer(ncols)
    for row, b in zip(rows, rhs):
        aug = dict(row)
        b = to_rational(b)
        if b != 0:
            aug[RHS] = b
        red.add(aug)
    return red.particular_solution(), red.kernel()
