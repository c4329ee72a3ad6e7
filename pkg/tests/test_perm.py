import itertools
from collections import Counter

import numpy as np
import pytest
from gmpy2 import mpq

from curvsym.perm import (
    PHI_TERMS,
    PSI_TERMS,
    PermOperator,
    builtin_operators,
    cyclic_sum,
    dumps_operator,
    identity_op,
    loads_operator,
    op_apply,
    op_compose,
    phi,
    psi,
)
from curvsym.tensor import StructureError, TensorParseError, linear_combine, permute, random_rational, zeros

LETTERS = {c: i for i, c in enumerate("ijklm")}


def at(pattern):
    """Component index of a pattern when i, j, k, l, m take the values 0..4."""
    return tuple(LETTERS[c] for c in pattern)


# Each term is pinned by one component, read directly off the index pattern.
PHI_PINS = ["ijklm", "kjmli", "mjilk", "ilkjm", "klmji", "mlijk"]
PSI_PINS = ["ijlkm", "jkilm", "jlimk", "ijkml"]


@pytest.mark.parametrize("pos", range(6))
def test_phi_term_pinned(pos):
    R = random_rational(5, 5, np.random.default_rng(pos))
    image, coeff = PHI_TERMS[pos]
    T = op_apply(PermOperator({image: coeff}), R)
    assert T[at("ijklm")] == R[at(PHI_PINS[pos])]


@pytest.mark.parametrize("pos", range(4))
def test_psi_term_pinned(pos):
    T = random_rational(5, 5, np.random.default_rng(10 + pos))
    image, coeff = PSI_TERMS[pos]
    R = op_apply(PermOperator({image: 1}), T)
    assert R[at("jimkl")] == T[at(PSI_PINS[pos])]


def test_coefficient_multisets():
    assert Counter(phi().coefficients()) == Counter({mpq(1): 6})
    assert len(phi()) == 6
    assert sorted(psi().coefficients()) == [mpq(-1, 6), mpq(-1, 12), mpq(1, 12), mpq(1, 6)]
    assert psi(typo=True) != psi()


def test_identity_and_zero():
    T = random_rational(2, 5, np.random.default_rng(0))
    assert op_apply(identity_op(), T) == T
    assert op_apply(phi(), zeros(3, 5)).is_zero()


def test_apply_needs_rank_five():
    with pytest.raises(StructureError):
        op_apply(phi(), random_rational(2, 4, np.random.default_rng(0)))


def test_apply_matches_permute_sum(rng):
    T = random_rational(3, 5, rng)
    expected = linear_combine([c for _, c in PSI_TERMS], [permute(T, s) for s, _ in PSI_TERMS])
    assert op_apply(psi(), T) == expected


def random_operator(rng, size=5):
    perms = list(itertools.permutations(range(5)))
    picks = rng.choice(len(perms), size=size, replace=False)
    return PermOperator({perms[p]: mpq(int(rng.integers(-4, 5)), int(rng.integers(1, 4))) for p in picks})


@pytest.mark.parametrize("seed", range(8))
def test_compose_is_homomorphism(seed):
    g = np.random.default_rng(seed)
    P, Q = random_operator(g), random_operator(g)
    T = random_rational(2, 5, g)
    assert op_apply(op_compose(P, Q), T) == op_apply(P, op_apply(Q, T))


def test_compose_with_identity(rng):
    P = random_operator(rng)
    assert op_compose(identity_op(), P) == P
    assert op_compose(P, identity_op()) == P


def test_psi_after_phi_has_at_most_24_terms():
    assert len(op_compose(psi(), phi())) <= 24


def test_canonical_form():
    a = PermOperator([((1, 0, 2, 3, 4), 1), ((0, 1, 2, 3, 4), 2), ((1, 0, 2, 3, 4), -1)])
    assert a.terms == {(0, 1, 2, 3, 4): 2}
    b = PermOperator(a.terms)
    assert a == b and hash(a) == hash(b)
    assert list(PermOperator(dict(reversed(list(psi().items())))).items()) == list(psi().items())


def test_idempotents_and_cyclic_sums():
    ops = builtin_operators()
    for name in ("A12", "Pswap"):
        assert op_compose(ops[name], ops[name]) == ops[name]
    for name in ("B123", "B345"):
        assert op_compose(ops[name], ops[name]) == 3 * ops[name]
    assert ops["B123"] == cyclic_sum(0, 1, 2)


def test_antisymmetrizer_kills_symmetric_tensor(rng):
    T = random_rational(2, 5, rng)
    sym = T + permute(T, (1, 0, 2, 3, 4))
    assert op_apply(builtin_operators()["A12"], sym).is_zero()


def test_operator_serialization():
    text = dumps_operator(psi())
    assert '"image": [2, 1, 5, 4, 3]' in text
    assert loads_operator(text) == psi()
    with pytest.raises(TensorParseError):
        loads_operator('[{"image": [1, 1, 2, 3, 4], "coeff": "1"}]')
    with pytest.raises(TensorParseError):
        loads_operator('{"image": [1, 2, 3, 4, 5]}')
