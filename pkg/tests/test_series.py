from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cyzeta.assembly import build_W_inverse, sigma
from cyzeta.series import (SeriesError, TruncSeries, kronecker_mul, rat_matrix_invert,
                           series_add, series_matrix_invert, series_mul, series_mul_fast,
                           substitute_phi_p, theta_apply)


def S(coeffs, p=11, k=3, shift=0):
    q = p**k
    return TruncSeries(p, k, [c % q for c in coeffs], shift)


def naive_conv(a, b, n):
    out = [0] * n
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            if i + j < n:
                out[i + j] += x * y
    return out


def test_small_products():
    assert series_mul(S([1, 1, 0]), S([1, -1, 0])).coeffs == S([1, 0, -1]).coeffs
    a = S([3, 5, 7, 11])
    assert series_mul(a, S([1, 0, 0, 0])).coeffs == a.coeffs


series8 = st.lists(st.integers(-10**6, 10**6), min_size=9, max_size=9)


@given(series8, series8)
def test_mul_matches_integer_convolution(a, b):
    q = 11**3
    got = series_mul(S(a), S(b)).coeffs
    assert got == [x % q for x in naive_conv(a, b, 9)]
    assert series_mul_fast(S(a), S(b)).coeffs == got


@given(st.lists(st.integers(0, 7**5 - 1), min_size=1, max_size=40),
       st.lists(st.integers(0, 7**5 - 1), min_size=1, max_size=40))
def test_kronecker_matches_numpy_convolution(a, b):
    q = 7**5
    ref = np.convolve(np.array(a, dtype=object), np.array(b, dtype=object))
    assert kronecker_mul(a, b, q) == [int(x) % q for x in ref]


@given(series8, series8)
def test_add_commutes(a, b):
    assert series_add(S(a), S(b)).coeffs == series_add(S(b), S(a)).coeffs


def test_theta():
    assert theta_apply(S([1, 2, 3])).coeffs == [0, 2, 6]
    assert theta_apply(S([1, 2, 3]), 0).coeffs == [1, 2, 3]
    x = S([0] * 5 + [1])
    assert theta_apply(x, 2).coeffs[5] == 25


def test_substitute_phi_p():
    assert substitute_phi_p(S([1, 2], p=5), 5, 10, polynomial=True).coeffs == [1, 0, 0, 0, 0, 2, 0, 0, 0, 0, 0]
    assert substitute_phi_p(S([4, 0], p=5), 5, 7).coeffs == [4] + [0] * 7
    got = substitute_phi_p(S([1, 1, 1], p=3), 3, 6).coeffs
    assert got == [1, 0, 0, 1, 0, 0, 1]
    with pytest.raises(SeriesError):
        substitute_phi_p(S([1, 1], p=3), 3, 9)


def test_matrix_inverse_identity():
    I = [[S([int(i == j), 0, 0]) for j in range(3)] for i in range(3)]
    inv, ordv = series_matrix_invert(I)
    assert ordv == 0
    assert [[s.coeffs for s in row] for row in inv] == [[[int(i == j), 0, 0] for j in range(3)] for i in range(3)]


def test_geometric_series():
    inv, _ = series_matrix_invert([[S([1, -1, 0, 0, 0])]])
    assert inv[0][0].coeffs == [1, 1, 1, 1, 1]


@given(st.lists(st.lists(st.integers(-30, 30), min_size=4, max_size=4), min_size=4, max_size=4))
def test_matrix_inverse_matches_rational_twin(entries):
    # unimodular constant term: identity plus random higher terms
    b = 2
    p, k = 7, 4
    Mx_r = [[[Fraction(int(i == j))] + [Fraction(x) for x in entries[2 * i + j][1:]] for j in range(b)]
            for i in range(b)]
    Mx = [[TruncSeries.from_fractions(Mx_r[i][j], p, k) for j in range(b)] for i in range(b)]
    inv, _ = series_matrix_invert(Mx)
    ref = rat_matrix_invert(Mx_r)
    for i in range(b):
        for j in range(b):
            assert inv[i][j].coeffs == TruncSeries.from_fractions(ref[i][j], p, k).coeffs


@pytest.mark.parametrize("name", ["quintic", "k3", "aesz425"])
def test_W_at_zero_is_sigma(ops, name):
    op = ops[name]
    p, k = 13, 4
    Winv, ordv, E, Sig = build_W_inverse(op, p, k)
    assert ordv == 0
    b = op.b
    for i in range(b):
        for j in range(b):
            assert E[i][j].coeffs[0] == int(i == j)
    s = sigma(b)
    # sigma^{-1} = sigma^T up to the sign pattern; check W^{-1}(0) sigma = I
    W0inv = [[Winv[i][j].coeffs[0] for j in range(b)] for i in range(b)]
    prod = [[sum(W0inv[i][t] * s[t][j] for t in range(b)) % p**k for j in range(b)] for i in range(b)]
    assert prod == [[int(i == j) for j in range(b)] for i in range(b)]


def test_sigma_b3():
    assert sigma(3) == [[0, 0, 1], [0, -1, 0], [1, 0, 0]]
