import itertools
import json

import numpy as np
import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from curvsym import linalg
from curvsym.tensor import (
    FLOAT,
    StructureError,
    TensorParseError,
    basis_tensor,
    compose_perms,
    dumps_tensor,
    format_rational,
    inf_norm,
    invert_perm,
    linear_combine,
    loads_tensor,
    perm_from_pattern,
    permute,
    random_rational,
    tensor_new,
    to_rational,
    zeros,
)

S5 = list(itertools.permutations(range(5)))
perms5 = st.sampled_from(S5)


def small_tensor(seed, dim=2, rank=5):
    return random_rational(dim, rank, np.random.default_rng(seed))


# -- construction ----------------------------------------------------------

def test_basis_covector():
    T = tensor_new(2, 1, [1, 0])
    assert T.entries == [1, 0]
    assert T == basis_tensor(2, [0])


def test_zero_tensor_of_rank_five():
    T = tensor_new(2, 5, [0] * 32)
    assert T.is_zero()
    assert T == zeros(2, 5)


def test_wrong_length_reports_both_lengths():
    with pytest.raises(StructureError, match="expected 243 entries.*got 244"):
        tensor_new(3, 5, [0] * 244)


@pytest.mark.parametrize("dim, rank", [(0, 1), (9, 1), (2, 6), (2, 0)])
def test_bounds(dim, rank):
    with pytest.raises(StructureError):
        tensor_new(dim, rank, [0] * max(dim, 1) ** max(rank, 0))


def test_input_is_copied():
    entries = [1, 2, 3, 4]
    T = tensor_new(2, 2, entries)
    entries[0] = 99
    assert T.data[0, 0] == 1


def test_row_major_offsets():
    n = 3
    T = tensor_new(n, 3, list(range(n**3)))
    for idx in itertools.product(range(n), repeat=3):
        i1, i2, i3 = idx
        assert T[idx] == i1 * n**2 + i2 * n + i3


def test_rationals_are_reduced():
    q = to_rational("6/-4")
    assert (q.numerator, q.denominator) == (-3, 2)
    assert format_rational(mpq(4, 2)) == "2"
    assert format_rational(mpq(-2, 4)) == "-1/2"
    with pytest.raises(TypeError):
        to_rational(0.5)


# -- permutations ----------------------------------------------------------

def test_permute_identity():
    T = small_tensor(0)
    assert permute(T, range(5)) == T


def test_swap_of_product_covector():
    e12 = basis_tensor(2, [0, 1])
    assert permute(e12, (1, 0)) == basis_tensor(2, [1, 0])


def test_permute_convention_reads_source_slot():
    T = small_tensor(1, dim=3)
    sigma = (4, 1, 0, 3, 2)
    P = permute(T, sigma)
    for J in [(0, 1, 2, 0, 1), (2, 2, 1, 0, 0)]:
        I = [0] * 5
        for j, s in enumerate(sigma):
            I[s] = J[j]
        assert P[J] == T[tuple(I)]


def test_pattern_helper():
    # T_{ijklm} = R_{kjmli}: output letter i sits in source slot 5
    assert perm_from_pattern("ijklm", "kjmli") == (4, 1, 0, 3, 2)
    with pytest.raises(StructureError):
        perm_from_pattern("ijklm", "ijkla")


def test_rank_mismatch():
    with pytest.raises(StructureError):
        permute(small_tensor(0), (1, 0))


@settings(max_examples=40, deadline=None)
@given(perms5, perms5, st.integers(0, 2**16))
def test_permute_is_right_action(s, t, seed):
    T = small_tensor(seed)
    assert permute(permute(T, s), t) == permute(T, compose_perms(s, t))


@settings(max_examples=40, deadline=None)
@given(perms5, st.integers(0, 2**16))
def test_permute_inverse(s, seed):
    T = small_tensor(seed)
    assert permute(permute(T, s), invert_perm(s)) == T


@settings(max_examples=30, deadline=None)
@given(perms5, st.integers(-5, 5), st.integers(-5, 5), st.integers(0, 2**16))
def test_combine_distributes_over_permute(s, a, b, seed):
    T, S = small_tensor(seed), small_tensor(seed + 1)
    lhs = permute(linear_combine([a, b], [T, S]), s)
    rhs = linear_combine([a, b], [permute(T, s), permute(S, s)])
    assert lhs == rhs


# -- linear combinations ---------------------------------------------------

def test_combine_cancels():
    T = small_tensor(3)
    assert linear_combine([1, -1], [T, T]).is_zero()


def test_combine_doubles():
    T = small_tensor(4)
    assert linear_combine([2], [T]).entries == [2 * v for v in T.entries]


def test_symmetrization():
    T = small_tensor(5, rank=2)
    S = linear_combine([mpq(1, 2), mpq(1, 2)], [T, permute(T, (1, 0))])
    assert S == permute(S, (1, 0))
    assert S[0, 1] == (T[0, 1] + T[1, 0]) / 2


def test_combine_errors():
    T = small_tensor(0)
    with pytest.raises(StructureError):
        linear_combine([], [])
    with pytest.raises(StructureError):
        linear_combine([1], [T, T])
    with pytest.raises(StructureError):
        linear_combine([1, 1], [T, small_tensor(0, dim=3)])
    F = tensor_new(2, 5, [0.0] * 32, FLOAT)
    with pytest.raises(StructureError):
        linear_combine([1, 1], [T, F])


def test_inf_norm():
    assert inf_norm(zeros(2, 3)) == 0
    T = tensor_new(2, 1, [-3, 1])
    assert inf_norm(T) == 3


# -- exact linear algebra --------------------------------------------------

def test_nullspace_of_identity_is_empty():
    assert linalg.nullspace([[1, 0, 0], [0, 1, 0], [0, 0, 1]]) == []


def test_nullspace_single_equation():
    assert linalg.nullspace([[1, 1]]) == [[1, -1]]


def test_nullspace_is_canonical():
    rows = [[1, 2, 3, 4], [2, 4, 6, 8], [0, 1, 1, 1]]
    basis = linalg.nullspace(rows)
    shuffled = linalg.nullspace([rows[2], rows[0], rows[1]])
    assert basis == shuffled
    for vec in basis:
        first = next(v for v in vec if v != 0)
        assert first == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(1, 7), st.integers(0, 2**16))
def test_rank_nullity_and_kernel(nrows, ncols, seed):
    g = np.random.default_rng(seed)
    # low-rank products make nontrivial kernels likely
    A = g.integers(-2, 3, size=(nrows, 2)) @ g.integers(-2, 3, size=(2, ncols))
    rows = [[int(v) for v in r] for r in A]
    kernel = linalg.nullspace(rows, ncols)
    r = linalg.rank(rows)
    assert r + len(kernel) == ncols
    for vec in kernel:
        for row in rows:
            assert sum(a * b for a, b in zip(row, vec)) == 0
    if kernel:
        assert linalg.rank(kernel) == len(kernel)


def test_solve_consistent_and_inconsistent():
    rows = [{0: 1, 1: 1}, {1: 1}]
    sol, kernel = linalg.solve_sparse(rows, [3, 1], 2)
    assert sol == {0: 2, 1: 1} and kernel == []
    sol, _ = linalg.solve_sparse([{0: 1}, {0: 2}], [1, 3], 1)
    assert sol is None


# -- serialization ---------------------------------------------------------

def test_round_trip_rational(rng):
    T = linear_combine([mpq(1, 3)], [random_rational(3, 5, rng)])
    assert loads_tensor(dumps_tensor(T)) == T


def test_round_trip_float(rng):
    T = tensor_new(2, 3, list(rng.standard_normal(8) / 3), FLOAT)
    U = loads_tensor(dumps_tensor(T))
    assert np.array_equal(U.data, T.data)


def test_non_reduced_literal_is_normalized():
    T = loads_tensor('{"dim": 2, "rank": 1, "kind": "rational", "entries": ["2/4", "3"]}')
    assert json.loads(dumps_tensor(T))["entries"] == ["1/2", "3"]


def test_truncated_text_reports_position():
    with pytest.raises(TensorParseError, match=r"line 1, column \d+ \(offset \d+\)"):
        loads_tensor('{"dim": 2, "rank": 1, "kind": "rational", "entries": ["1",')


@pytest.mark.parametrize("record", [
    {"dim": 2, "rank": 1, "kind": "rational"},
    {"dim": 2, "rank": 1, "kind": "complex", "entries": ["1", "2"]},
    {"dim": 2, "rank": 1, "kind": "rational", "entries": ["1", "x"]},
    {"dim": 2, "rank": 1, "kind": "rational", "entries": ["1", "1/0"]},
    {"dim": 2, "rank": 1, "kind": "rational", "entries": ["1"]},
])
def test_malformed_records(record):
    with pytest.raises(TensorParseError):
        loads_tensor(json.dumps(record))
