import random

import pytest
from hypothesis import given, strategies as st

from cyzeta.evaluation import (CONIFOLD, GOOD, ChirpDFT, EulerFactorRecord, classify_point,
                               complete_factor, euler_factor_from_U, hasse_witt_check, horner_all,
                               newton_coefficients, teichmuller_points, weil_ok)
from cyzeta.pipeline import compute_prime
from oracles import charpoly_coeffs


def test_teichmuller_points_small():
    assert sorted(teichmuller_points(5, 2).lifts) == [1, 7, 18, 24]
    assert sorted(teichmuller_points(5, 1).lifts) == [1, 2, 3, 4]


@pytest.mark.parametrize("p,B", [(7, 4), (11, 3), (101, 4)])
def test_teichmuller_points_product(p, B):
    pts = teichmuller_points(p, B)
    q = p**B
    prod = 1
    for t in pts.lifts:
        prod = prod * t % q
        assert pow(t, p - 1, q) == 1
    assert prod == q - 1
    assert sorted(pts.residues) == list(range(1, p))


def test_evaluate_identity_polynomial():
    pts = teichmuller_points(11, 3)
    assert horner_all([0, 1], pts.lifts, 11**3) == pts.lifts


@given(st.lists(st.integers(0, 11**3 - 1), min_size=1, max_size=51))
def test_chirp_dft_matches_horner(poly):
    p, B = 11, 3
    pts = teichmuller_points(p, B)
    dft = ChirpDFT(pts.lifts[1], p - 1, p**B)
    assert dft(poly) == horner_all(poly, pts.lifts, p**B)


def test_identity_matrix_factor():
    I = [[int(i == j) for j in range(4)] for i in range(4)]
    assert newton_coefficients(I, 4, 7**4, 7) == [1, -4 % 7**4, 6, -4 % 7**4, 1]


def test_newton_matches_determinant_oracle():
    rng = random.Random(4)
    q = 7**4
    for _ in range(5):
        U = [[rng.randrange(q) for _ in range(4)] for _ in range(4)]
        assert newton_coefficients(U, 4, q, 7) == charpoly_coeffs(U, q)


def test_functional_equation_completion():
    p = 7
    full = complete_factor([1, 5, 385], 4, p)
    assert full == [1, 5, 385, 5 * p**3, p**6]
    assert complete_factor([1, 11, -121], 3, 11, -1) == [1, 11, -121, -1331]


def test_weil_bounds():
    p = 7
    assert weil_ok([1, 74, 6 * p**3, 0, p**6], 4, p)  # 74 <= 4 * 7^1.5 < 75
    assert not weil_ok([1, 75, 0, 0, p**6], 4, p)
    assert not weil_ok([1, 0, 6 * p**3 + 1, 0, p**6], 4, p)


def test_quintic_conifold_point(quintic):
    assert classify_point(quintic, 5, 7, quintic.denominator()) == CONIFOLD
    assert classify_point(quintic, 2, 7, quintic.denominator()) == GOOD


def test_quintic_p7_records(quintic):
    res = compute_prime(quintic, 7)
    assert [r.phi_star for r in res.records] == [1, 2, 3, 4, 5, 6]
    assert [r.phi_star for r in res.records if r.flag == CONIFOLD] == [5]
    rec = res.records[1]
    # f_0 truncated at p-1 evaluated at 2 is 1 + 120*2 = 3 mod 7
    assert rec.coeffs[0] % 7 == (-3) % 7
    assert hasse_witt_check(quintic, 7, rec) is True


@pytest.mark.parametrize("name", ["quintic", "k3", "aesz425"])
@pytest.mark.parametrize("p", [7, 11, 13, 53])
def test_hasse_witt_all_points(ops, tables, name, p):
    res = compute_prime(ops[name], p, table=tables[name])
    verdicts = [hasse_witt_check(ops[name], p, r) for r in res.records if r.flag == GOOD]
    assert False not in verdicts
    assert True in verdicts


def test_euler_factor_from_identity():
    I = [[int(i == j) for j in range(4)] for i in range(4)]
    coeffs, full = euler_factor_from_U(I, 4, 7, 4, check=False)
    assert coeffs == [-4, 6]
