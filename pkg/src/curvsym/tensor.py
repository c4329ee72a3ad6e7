"""Dense multi-index tensors over exact rationals or float64.

Components are stored row-major: ``T[i1, ..., ik]`` lives at flat offset
``sum(i_j * n**(k - j))`` with 0-based indices.

Slot permutations
-----------------
A permutation ``sigma`` of the slots is an image tuple (0-based internally,
1-based in serialized form).  The convention used everywhere in this
package is

    permute(T, sigma)[J] = T[I]   where   I[sigma[j]] = J[j],

i.e. output slot ``j`` carries the index that input slot ``sigma[j]`` had.
For example the term ``R_{kjml,i}`` seen from output letters ``ijklm``
places output letter ``i`` into input slot 5, ``j`` into 2, ``k`` into 1,
``l`` into 4 and ``m`` into 3, so ``sigma = (4, 1, 0, 3, 2)``; see
:func:`perm_from_pattern`.

With this convention ``permute`` is a right action:
``permute(permute(T, s), t) == permute(T, compose_perms(s, t))`` where
``compose_perms(s, t)[j] == s[t[j]]``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from gmpy2 import mpq

RATIONAL = "rational"
FLOAT = "float"
KINDS = (RATIONAL, FLOAT)

MAX_DIM = 8
MAX_RANK = 5


class StructureError(ValueError):
    """Shape, rank or kind mismatch between tensors or their inputs."""


class TensorParseError(ValueError):
    """Malformed serialized tensor or operator."""


def to_rational(x) -> mpq:
    """Coerce an int, Fraction, mpq or ``"p/q"`` string to an exact rational."""
    if isinstance(x, float):
        raise TypeError("refusing to convert a float to an exact rational")
    if isinstance(x, str):
        x = x.strip()
        if not x:
            raise ValueError("empty rational literal")
        return mpq(x)
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return mpq(int(x.numerator), int(x.denominator))
    return mpq(x)


def format_rational(q: mpq) -> str:
    """Canonical text form: ``"p/q"`` in lowest terms, ``"p"`` when q == 1."""
    q = mpq(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


Perm = tuple  # 0-based image tuple


def identity_perm(k: int) -> Perm:
    return tuple(range(k))


def check_perm(sigma: Sequence[int], k: int | None = None) -> Perm:
    sigma = tuple(int(s) for s in sigma)
    if sorted(sigma) != list(range(len(sigma))):
        raise StructureError(f"{sigma} is not a permutation of 0..{len(sigma) - 1}")
    if k is not None and len(sigma) != k:
        raise StructureError(f"permutation acts on {len(sigma)} slots, tensor has rank {k}")
    return sigma


def compose_perms(s: Perm, t: Perm) -> Perm:
    """Product ``s t`` with ``(s t)[j] = s[t[j]]``."""
    return tuple(s[j] for j in t)


def invert_perm(s: Perm) -> Perm:
    inv = [0] * len(s)
    for j, sj in enumerate(s):
        inv[sj] = j
    return tuple(inv)


def perm_from_pattern(output: str, source: str) -> Perm:
    """Slot permutation for an index pattern like ``T_{ijklm} <- R_{kjmli}``.

    ``output`` lists the index letters of the result slots and ``source`` the
    letters of the tensor being read.  Letters must be distinct.
    """
    if sorted(output) != sorted(source) or len(set(output)) != len(output):
        raise StructureError(f"patterns {output!r} and {source!r} are not rearrangements")
    return tuple(source.index(c) for c in output)


@dataclass(frozen=True, eq=False)
class DenseTensor:
    """Homogeneous-kind dense tensor of shape ``(dim,) * rank``."""

    dim: int
    rank: int
    kind: str
    data: np.ndarray

    @property
    def entries(self) -> list:
        return list(self.data.ravel())

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    def __getitem__(self, idx):
        return self.data[idx]

    def flat(self) -> np.ndarray:
        return self.data.ravel()

    def is_zero(self) -> bool:
        return not np.any(self.data != 0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DenseTensor):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.rank == other.rank
            and self.kind == other.kind
            and bool(np.all(self.data == other.data))
        )

    __hash__ = None

    def __add__(self, other: "DenseTensor") -> "DenseTensor":
        return linear_combine([1, 1], [self, other])

    def __sub__(self, other: "DenseTensor") -> "DenseTensor":
        return linear_combine([1, -1], [self, other])

    def __repr__(self) -> str:
        return f"DenseTensor(dim={self.dim}, rank={self.rank}, kind={self.kind!r})"


def _check_shape(dim: int, rank: int) -> None:
    if not (isinstance(dim, (int, np.integer)) and 1 <= dim <= MAX_DIM):
        raise StructureError(f"dim must be in 1..{MAX_DIM}, got {dim}")
    if not (isinstance(rank, (int, np.integer)) and 1 <= rank <= MAX_RANK):
        raise StructureError(f"rank must be in 1..{MAX_RANK}, got {rank}")


def _as_array(values: Iterable, kind: str) -> np.ndarray:
    if kind == RATIONAL:
        vals = [to_rational(v) for v in values]
        arr = np.empty(len(vals), dtype=object)
        arr[:] = vals
        return arr
    if kind == FLOAT:
        return np.array([float(v) for v in values], dtype=np.float64)
    raise StructureError(f"unknown scalar kind {kind!r}")


def tensor_new(dim: int, rank: int, entries: Sequence, kind: str = RATIONAL) -> DenseTensor:
    """Build a tensor from a flat row-major list; the input is copied."""
    _check_shape(dim, rank)
    expected = dim**rank
    if len(entries) != expected:
        raise StructureError(f"expected {expected} entries for dim={dim}, rank={rank}, got {len(entries)}")
    arr = _as_array(entries, kind).reshape((dim,) * rank)
    return DenseTensor(dim, rank, kind, arr)


def from_array(arr: np.ndarray, kind: str | None = None) -> DenseTensor:
    """Wrap a cubical numpy array (copied).  Object arrays are rational."""
    arr = np.asarray(arr)
    if kind is None:
        kind = RATIONAL if arr.dtype == object else FLOAT
    if arr.ndim == 0 or len(set(arr.shape)) != 1:
        raise StructureError(f"array of shape {arr.shape} is not cubical")
    return tensor_new(arr.shape[0], arr.ndim, list(arr.ravel()), kind)


def zeros(dim: int, rank: int, kind: str = RATIONAL) -> DenseTensor:
    _check_shape(dim, rank)
    if kind == RATIONAL:
        arr = np.empty((dim,) * rank, dtype=object)
        arr.fill(mpq(0))
    else:
        arr = np.zeros((dim,) * rank)
    return DenseTensor(dim, rank, kind, arr)


def basis_tensor(dim: int, index: Sequence[int], kind: str = RATIONAL) -> DenseTensor:
    """The product covector e^{i1} x ... x e^{ik} (0-based indices)."""
    t = zeros(dim, len(index), kind)
    t.data[tuple(index)] = mpq(1) if kind == RATIONAL else 1.0
    return t


def permute(T: DenseTensor, sigma: Sequence[int]) -> DenseTensor:
    """Rearrange slots; output slot j reads input slot ``sigma[j]``."""
    sigma = check_perm(sigma, T.rank)
    return DenseTensor(T.dim, T.rank, T.kind, np.ascontiguousarray(np.transpose(T.data, sigma)))


def _coerce_coeff(c, kind: str):
    return to_rational(c) if kind == RATIONAL else float(c)


def linear_combine(coeffs: Sequence, tensors: Sequence[DenseTensor]) -> DenseTensor:
    """Componentwise ``sum(c_i * T_i)``; exact in rational kind."""
    if not tensors:
        raise StructureError("linear_combine needs at least one tensor")
    if len(coeffs) != len(tensors):
        raise StructureError(f"{len(coeffs)} coefficients for {len(tensors)} tensors")
    first = tensors[0]
    for t in tensors[1:]:
        if (t.dim, t.rank, t.kind) != (first.dim, first.rank, first.kind):
            raise StructureError(
                f"cannot combine {(t.dim, t.rank, t.kind)} with {(first.dim, first.rank, first.kind)}"
            )
    acc = None
    for c, t in zip(coeffs, tensors):
        c = _coerce_coeff(c, first.kind)
        if c == 0:
            continue
        term = t.data if c == 1 else c * t.data
        acc = term.copy() if acc is None else acc + term
    if acc is None:
        return zeros(first.dim, first.rank, first.kind)
    return DenseTensor(first.dim, first.rank, first.kind, acc)


def scale(c, T: DenseTensor) -> DenseTensor:
    return linear_combine([c], [T])


def inf_norm(T: DenseTensor):
    """Largest absolute component (an exact rational for rational tensors)."""
    if T.kind == RATIONAL:
        return max((abs(v) for v in T.data.ravel()), default=mpq(0))
    return float(np.max(np.abs(T.data))) if T.data.size else 0.0


def to_float(T: DenseTensor) -> DenseTensor:
    if T.kind == FLOAT:
        return T
    return DenseTensor(T.dim, T.rank, FLOAT, T.data.astype(np.float64))


def random_rational(dim: int, rank: int, rng: np.random.Generator, lo: int = -3, hi: int = 3) -> DenseTensor:
    vals = rng.integers(lo, hi + 1, size=dim**rank)
    return tensor_new(dim, rank, [int(v) for v in vals])


# -- serialization ---------------------------------------------------------

def tensor_to_dict(T: DenseTensor) -> dict:
    if T.kind == RATIONAL:
        entries = [format_rational(v) for v in T.data.ravel()]
    else:
        # json writes floats with repr(), the shortest round-trip form
        entries = [float(v) for v in T.data.ravel()]
    return {"dim": T.dim, "rank": T.rank, "kind": T.kind, "entries": entries}


def tensor_from_dict(d: dict) -> DenseTensor:
    try:
        dim, rank, kind, entries = d["dim"], d["rank"], d["kind"], d["entries"]
    except (KeyError, TypeError) as exc:
        raise TensorParseError(f"tensor record missing field: {exc}") from None
    if kind not in KINDS:
        raise TensorParseError(f"unknown kind {kind!r}")
    if not isinstance(entries, list):
        raise TensorParseError("entries must be a list")
    try:
        if kind == RATIONAL:
            parsed = []
            for pos, e in enumerate(entries):
                if not isinstance(e, (str, int)) or isinstance(e, bool):
                    raise TensorParseError(f"entry {pos}: rational entries must be strings 'p/q'")
                try:
                    parsed.append(to_rational(str(e)))
                except (ValueError, ZeroDivisionError):
                    raise TensorParseError(f"entry {pos}: bad rational literal {e!r}") from None
            entries = parsed
        return tensor_new(dim, rank, entries, kind)
    except StructureError as exc:
        raise TensorParseError(str(exc)) from None


def dumps_tensor(T: DenseTensor) -> str:
    return json.dumps(tensor_to_dict(T), sort_keys=True)


def loads_tensor(text: str) -> DenseTensor:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TensorParseError(f"line {exc.lineno}, column {exc.colno} (offset {exc.pos}): {exc.msg}") from None
    return tensor_from_dict(d)


def float_close(a: DenseTensor, b: DenseTensor, tol: float) -> bool:
    return math.isclose(0.0, inf_norm(to_float(a) - to_float(b)), abs_tol=tol)
