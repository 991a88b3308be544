from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from cyzeta.operator import (CYOperator, OperatorError, derive_recurrence, get_operator,
                             load_database, parse_operator, poly_eval, serialize_operator,
                             validate_operator)
from cyzeta.recurrence import run_exact_recurrence
from oracles import domb, frobenius_coefficients, quintic_f0, theta_form

t, phi = sympy.symbols("t phi")


def coeffs_of(expr, b, N):
    """S_i(phi) ascending lists from an expression in theta (t) and phi."""
    P = sympy.Poly(sympy.expand(expr), t, phi)
    return [[int(P.coeff_monomial(t**i * phi**k)) for k in range(N + 1)] for i in range(b + 1)]


def test_quintic_matches_closed_form_operator(quintic):
    L = t**4 - 5 * phi * (5 * t + 1) * (5 * t + 2) * (5 * t + 3) * (5 * t + 4)
    assert [list(S) + [0] * (2 - len(S)) for S in quintic.coeffs] == coeffs_of(L, 4, 1)
    assert (quintic.b, quintic.N) == (4, 1)


def test_k3_matches_closed_form_operator(k3):
    L = t**3 + 64 * phi**2 * (t + 1) ** 3 - 2 * phi * (2 * t + 1) * (5 * t * (t + 1) + 2)
    assert [list(S) for S in k3.coeffs] == coeffs_of(L, 3, 2)
    assert (k3.b, k3.N) == (3, 2)


def test_aesz425_discriminant_at_minus_one(aesz425):
    assert poly_eval(aesz425.conifold_locus, -1) == 79


def test_mum_violation_is_reported():
    with pytest.raises(OperatorError, match="MUM"):
        parse_operator("bad | 4 | 0 | 1 ; 0 ; 0 ; 0 ; 1 | 1 | 1 | - | - | - | -")


def test_parse_rejects_wrong_field_count():
    with pytest.raises(OperatorError, match="10"):
        parse_operator("x | 4 | 1")


def test_unknown_operator():
    with pytest.raises(OperatorError, match="unknown operator"):
        get_operator("nope")


def test_database_roundtrip():
    for op in load_database().values():
        assert parse_operator(serialize_operator(op)) == op


@given(st.integers(-50, 50).filter(bool), st.integers(-50, 50), st.integers(1, 9))
def test_serialize_roundtrip_random(a, c, Cnum):
    # theta^3 - phi (a theta^3 + ... ) with a MUM point and generic coefficients
    line = f"r | 3 | 1 | 0,{c} ; 0,{a} ; 0,{a + c} ; 1,{a} | {Cnum}/2 | - | 1,{a} | - | - | -"
    op = parse_operator(line)
    assert parse_operator(serialize_operator(op)) == op


@pytest.mark.parametrize("name", ["quintic", "k3", "aesz425"])
def test_validation_passes(ops, name):
    rep = validate_operator(ops[name], 1, 20)
    assert rep.ok, rep.lines()


def test_validation_flags_non_integral_operator():
    op = parse_operator("bad | 3 | 1 | 0,-3 ; 0,-1 ; 0,-5 ; 1,-7 | 1 | - | 1,-7 | - | - | -")
    rep = validate_operator(op, 1, 12)
    assert not rep.ok


def test_quintic_recurrence_polys(quintic, tables):
    n = sympy.symbols("n")
    R01 = sympy.Poly(5 * (5 * n - 4) * (5 * n - 3) * (5 * n - 2) * (5 * n - 1), n).all_coeffs()[::-1]
    assert list(tables["quintic"].R(0, 1)) == [int(c) for c in R01]


def test_k3_recurrence_polys(tables):
    n = sympy.symbols("n")
    R01 = sympy.Poly(2 * (2 * n - 1) * (5 * n**2 - 5 * n + 2), n).all_coeffs()[::-1]
    R02 = sympy.Poly(-64 * (n - 1) ** 3, n).all_coeffs()[::-1]
    assert list(tables["k3"].R(0, 1)) == [int(c) for c in R01]
    assert list(tables["k3"].R(0, 2)) == [int(c) for c in R02]


@pytest.mark.parametrize("name", ["quintic", "k3", "aesz425"])
def test_same_n_coupling(ops, tables, name):
    b = ops[name].b
    G1 = tables[name].G(1)
    assert all(poly_eval(G1, m) == -b * m ** (b - 1) for m in range(1, 6))


def test_closed_form_periods(quintic, k3, tables):
    q = run_exact_recurrence(quintic, tables["quintic"], 0, 12)[0]
    assert q == [quintic_f0(n) for n in range(13)]
    assert q[2] == 113400
    d = run_exact_recurrence(k3, tables["k3"], 0, 12)[0]
    assert d == [domb(n) for n in range(13)]


@pytest.mark.parametrize("name", ["quintic", "k3", "aesz425"])
def test_exact_recurrence_matches_frobenius_oracle(ops, tables, name):
    op = ops[name]
    ours = run_exact_recurrence(op, tables[name], op.b - 1, 8)
    assert ours == frobenius_coefficients(theta_form(op), op.b, 8)
    assert all(ours[i][0] == (i == 0) for i in range(op.b))
