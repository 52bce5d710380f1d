"""
Exact linear algebra over F_p
"""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sympy import prevprime

import exactla as la
from errors import NoSolution, SingularMatrix

P = 32003


def matrices(max_rows=5, max_cols=5):
    return st.tuples(st.integers(1, max_rows), st.integers(1, max_cols), st.integers(0, 2**31)).map(
        lambda t: np.random.default_rng(t[2]).integers(0, 4, size=(t[0], t[1])).astype(np.int64)
    )


def test_field_rejects_composite():
    with pytest.raises(ValueError):
        la.Field(32004)


def test_field_rejects_primes_that_overflow_int64():
    with pytest.raises(ValueError, match="overflow"):
        la.Field(2147483647)


def test_products_exact_at_largest_prime():
    p = prevprime(la.MAX_PRIME)
    la.Field(p)
    m = np.full((3, 3), p - 1, dtype=np.int64)
    assert np.all(la.mul(m, m, p) == 3)
    big = np.full((1, 1024), p - 1, dtype=np.int64)
    assert la.mul(big, big.T, p)[0, 0] == 1024 % p


def test_field_inverse():
    f = la.Field(P)
    assert (f.inv(7) * 7) % P == 1
    with pytest.raises(ZeroDivisionError):
        f.inv(0)


@given(matrices())
def test_rank_nullity(m):
    k = la.kernel_basis(m, P)
    assert la.rank(m, P) + k.shape[0] == m.shape[0]
    assert not np.any(la.mul(k, m, P))


@given(matrices())
def test_rref_is_idempotent(m):
    r, piv = la.rref(m, P)
    r2, piv2 = la.rref(r, P)
    assert piv == piv2
    assert np.array_equal(r, r2)


@given(matrices(4, 4), st.integers(0, 2**31))
def test_solve_recovers_a_preimage(a, seed):
    x = np.random.default_rng(seed).integers(0, P, size=(2, a.shape[0])).astype(np.int64)
    b = la.mul(x, a, P)
    y = la.solve(a, b, P)
    assert np.array_equal(la.mul(y, a, P), b)


def test_solve_without_solution():
    a = np.array([[1, 0]], dtype=np.int64)
    with pytest.raises(NoSolution):
        la.solve(a, np.array([[0, 1]]), P)


def test_inverse_and_singular():
    a = np.array([[2, 1], [1, 1]], dtype=np.int64)
    assert np.array_equal(la.mul(a, la.inverse(a, P), P), np.eye(2, dtype=np.int64))
    with pytest.raises(SingularMatrix):
        la.inverse(np.array([[1, 2], [2, 4]]), P)


@given(matrices(3, 4), matrices(3, 4))
def test_intersection_inside_both(u, w):
    if u.shape[1] != w.shape[1]:
        return
    meet = la.intersection(u, w, P)
    for row in meet:
        assert la.in_row_space(row, u, P)
        assert la.in_row_space(row, w, P)
    assert la.rank(u, P) + la.rank(w, P) == la.rank(la.vstack([u, w]), P) + meet.shape[0]


@given(matrices(3, 5))
def test_complement_spans_with_subspace(sub):
    comp = la.complement_basis(sub, sub.shape[1], P)
    assert la.rank(la.vstack([sub, comp]), P) == sub.shape[1]


def test_minimal_polynomial_of_nilpotent_block():
    n = np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]], dtype=np.int64)
    assert la.minimal_polynomial(n, P) == [0, 0, 0, 1]
    assert not np.any(la.poly_eval([0, 0, 0, 1], n, P))


def test_matrix_power_matches_repeated_product():
    a = np.array([[1, 1], [0, 1]], dtype=np.int64)
    assert np.array_equal(la.matrix_power(a, 5, P), np.array([[1, 5], [0, 1]]))
