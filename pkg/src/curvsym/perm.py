"""Group algebra Q[S_5] acting on the slots of (0,5)-tensors.

A :class:`PermOperator` is a finite formal sum ``sum(c_s * s)`` of slot
permutations with exact rational coefficients; applying it to ``T`` gives
``sum(c_s * permute(T, s))`` (slot convention documented in
:mod:`curvsym.tensor`).
"""
from __future__ import annotations

import json
from typing import Iterable, Mapping

from gmpy2 import mpq

from .tensor import (
    FLOAT,
    DenseTensor,
    StructureError,
    TensorParseError,
    check_perm,
    compose_perms,
    format_rational,
    identity_perm,
    linear_combine,
    perm_from_pattern,
    permute,
    to_rational,
)

SLOTS = 5
ID5 = identity_perm(SLOTS)


class PermOperator:
    """Canonical rational combination of slot permutations on 5 slots."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping | Iterable = ()):
        acc: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for perm, coeff in items:
            perm = check_perm(perm, SLOTS)
            acc[perm] = acc.get(perm, mpq(0)) + to_rational(coeff)
        self._terms = {p: acc[p] for p in sorted(acc) if acc[p] != 0}

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PermOperator):
            return NotImplemented
        return list(self._terms.items()) == list(other._terms.items())

    def __hash__(self):
        return hash(tuple(self._terms.items()))

    def __add__(self, other: "PermOperator") -> "PermOperator":
        return PermOperator(list(self.items()) + list(other.items()))

    def __sub__(self, other: "PermOperator") -> "PermOperator":
        return self + (-1) * other

    def __rmul__(self, c) -> "PermOperator":
        c = to_rational(c)
        return PermOperator({p: c * v for p, v in self.items()})

    def __matmul__(self, other: "PermOperator") -> "PermOperator":
        return op_compose(self, other)

    def coefficients(self) -> list[mpq]:
        return list(self._terms.values())

    def __repr__(self) -> str:
        body = " + ".join(f"{format_rational(c)}*{[i + 1 for i in p]}" for p, c in self.items())
        return f"PermOperator({body or '0'})"


def identity_op() -> PermOperator:
    return PermOperator({ID5: 1})


def op_apply(P: PermOperator, T: DenseTensor) -> DenseTensor:
    if T.rank != SLOTS:
        raise StructureError(f"operators act on rank-{SLOTS} tensors, got rank {T.rank}")
    if len(P) == 0:
        return linear_combine([0], [T])
    coeffs = [float(c) if T.kind == FLOAT else c for c in P.coefficients()]
    return linear_combine(coeffs, [permute(T, p) for p in P._terms])


def op_compose(P: PermOperator, Q: PermOperator) -> PermOperator:
    """Product with ``op_apply(op_compose(P, Q), T) == op_apply(P, op_apply(Q, T))``."""
    # permute(permute(T, q), p) == permute(T, q p)
    acc: dict = {}
    for p, a in P.items():
        for q, b in Q.items():
            key = compose_perms(q, p)
            acc[key] = acc.get(key, mpq(0)) + a * b
    return PermOperator(acc)


def op_equal_on_basis(P: PermOperator, Q: PermOperator, basis) -> bool:
    tensors = basis.basis if hasattr(basis, "basis") else basis
    return all(op_apply(P, b) == op_apply(Q, b) for b in tensors)


def from_patterns(output: str, terms: Iterable[tuple]) -> PermOperator:
    """Operator from ``(coeff, source_pattern)`` pairs, e.g. ``(1, "kjmli")``."""
    return PermOperator([(perm_from_pattern(output, src), c) for c, src in terms])


def transposition(a: int, b: int) -> tuple:
    s = list(ID5)
    s[a], s[b] = s[b], s[a]
    return tuple(s)


def cyclic_sum(a: int, b: int, c: int) -> PermOperator:
    """Unnormalized sum over cyclic rearrangements of slots a, b, c."""
    s1 = list(ID5)
    s1[a], s1[b], s1[c] = b, c, a
    s2 = list(ID5)
    s2[a], s2[b], s2[c] = c, a, b
    return PermOperator({ID5: 1, tuple(s1): 1, tuple(s2): 1})


# Phi: T_{ijklm} = R_{ijkl,m} + R_{kjml,i} + R_{mjil,k} + R_{ilkj,m} + R_{klmj,i} + R_{mlij,k}.
# Each image array below is perm_from_pattern("ijklm", <R pattern>); tests pin one component per term.
PHI_TERMS = (
    ((0, 1, 2, 3, 4), 1),  # R_{ijkl,m}
    ((4, 1, 0, 3, 2), 1),  # R_{kjml,i}
    ((2, 1, 4, 3, 0), 1),  # R_{mjil,k}
    ((0, 3, 2, 1, 4), 1),  # R_{ilkj,m}
    ((4, 3, 0, 1, 2), 1),  # R_{klmj,i}
    ((2, 3, 4, 1, 0), 1),  # R_{mlij,k}
)

# Psi (left inverse of Phi on the symmetry class): R_{jimk,l} = -1/6 T_{ijlkm} - 1/12 T_{jkilm} + 1/12 T_{jlimk} + 1/6 T_{ijkml}.
# Image arrays are perm_from_pattern("jimkl", <T pattern>).
PSI_TERMS = (
    ((1, 0, 4, 3, 2), mpq(-1, 6)),  # T_{ijlkm}
    ((0, 2, 4, 1, 3), mpq(-1, 12)),  # T_{jkilm}
    ((0, 2, 3, 4, 1), mpq(1, 12)),  # T_{jlimk}
    ((1, 0, 3, 2, 4), mpq(1, 6)),  # T_{ijkml}
)


def phi() -> PermOperator:
    return PermOperator(PHI_TERMS)


def psi(typo: bool = False) -> PermOperator:
    """The printed left inverse; ``typo`` perturbs one coefficient (fault injection)."""
    terms = list(PSI_TERMS)
    if typo:
        terms[0] = (terms[0][0], mpq(-1, 5))
    return PermOperator(terms)


def builtin_operators(psi_typo: bool = False) -> dict[str, PermOperator]:
    """Named operators.

    ``A12`` and ``Pswap`` are the normalized idempotents for slot-(1,2)
    antisymmetry and pair symmetry; ``B123`` and ``B345`` are the
    *unnormalized* cyclic sums (so ``B @ B == 3 * B``).
    """
    half = mpq(1, 2)
    return {
        "Id": identity_op(),
        "A12": PermOperator({ID5: half, transposition(0, 1): -half}),
        "Pswap": PermOperator({ID5: half, (2, 3, 0, 1, 4): half}),
        "B123": cyclic_sum(0, 1, 2),
        "B345": cyclic_sum(2, 3, 4),
        "Phi": phi(),
        "Psi": psi(psi_typo),
    }


# -- serialization ---------------------------------------------------------

def operator_to_list(P: PermOperator) -> list[dict]:
    return [{"image": [i + 1 for i in p], "coeff": format_rational(c)} for p, c in P.items()]


def operator_from_list(items) -> PermOperator:
    if not isinstance(items, list):
        raise TensorParseError("operator must be a JSON list")
    terms = []
    for pos, item in enumerate(items):
        try:
            image = [int(i) - 1 for i in item["image"]]
            coeff = to_rational(str(item["coeff"]))
            terms.append((check_perm(image, SLOTS), coeff))
        except (KeyError, TypeError, ValueError, ZeroDivisionError, StructureError) as exc:
            raise TensorParseError(f"operator term {pos}: {exc}") from None
    return PermOperator(terms)


def dumps_operator(P: PermOperator) -> str:
    return json.dumps(operator_to_list(P))


def loads_operator(text: str) -> PermOperator:
    try:
        return operator_from_list(json.loads(text))
    except json.JSONDecodeError as exc:
        raise TensorParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
