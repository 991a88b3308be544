import dataclasses

import pytest
import sympy
from hypothesis import given, strategies as st

from cyzeta.assembly import (AssemblyError, U0Matrix, assemble_U_numerator,
                             assemble_U_numerator_exact, build_U0, check_U0_symmetry, degree_cap,
                             sigma)
from cyzeta.evaluation import IntegrityError
from cyzeta.pipeline import compute_prime, numerator_for_prime


@given(st.sampled_from([7, 11, 13]), st.integers(0, 10**9))
def test_U0_symmetry_holds_for_any_alpha3(p, a3):
    check_U0_symmetry(U0Matrix(4, p, 6, 0, [1, 0, 0, a3]), 6)


def test_U0_symmetry_rejects_alpha1():
    # the defect is p^5 (alpha_1^2 - 2 alpha_2), invisible mod p^4
    check_U0_symmetry(U0Matrix(4, 7, 6, 0, [1, 1, 0, 0]), 4)
    with pytest.raises(AssemblyError):
        check_U0_symmetry(U0Matrix(4, 7, 6, 0, [1, 1, 0, 0]), 6)


def test_b3_constraint_forces_alpha2():
    # [DERIVED] symbolic 3x3 expansion of U sigma U^T = p^2 sigma
    t, a2, p = sympy.symbols("t a2 p")
    eps = sympy.Matrix([[0, 0, 0], [1, 0, 0], [0, 1, 0]])
    A = sympy.eye(3) + t * eps + a2 * eps**2
    U = sympy.diag(1, p, p**2) * A
    s = sympy.Matrix(sigma(3))
    sol = sympy.solve(list(U * s * U.T - p**2 * s), a2, dict=True)
    assert sol == [{a2: t**2 / 2}]


def test_U0_mod_p_pattern():
    U0 = build_U0(4, 7, 1, -40)
    F = U0.matrix_fraction()
    assert [[int(x) % 7 for x in row] for row in F] == [[1, 0, 0, 0]] + [[0] * 4] * 3


@pytest.mark.parametrize("name", ["quintic", "k3", "aesz425"])
@pytest.mark.parametrize("p", [7, 11, 13, 17])
def test_truncated_equals_exact_numerator(ops, tables, name, p):
    op = ops[name]
    a = assemble_U_numerator(op, p, nadd=3, table=tables[name])
    b = assemble_U_numerator_exact(op, p, nadd=3, table=tables[name])
    assert a.numerator == b.numerator
    assert a.nadd_ok and a.trunc_deg <= degree_cap(op, p)


def test_quintic_p7_termination(quintic, tables):
    num = assemble_U_numerator(quintic, 7, 4, 8, 3, table=tables["quintic"])
    assert num.nadd_ok
    assert num.trunc_deg <= 6
    assert degree_cap(quintic, 7) == 6


@pytest.mark.parametrize("p", [7, 11, 13])
def test_alpha3_perturbation_breaks_termination(quintic, tables, p):
    num = assemble_U_numerator(quintic, p, nadd=5, table=tables["quintic"], alpha3_shift=1)
    assert not num.nadd_ok


@pytest.mark.parametrize("dK", [-1, 1])
def test_wrong_K_is_detected(aesz425, tables, dK):
    bad = dataclasses.replace(aesz425, rational_K=aesz425.rational_K + dK)
    # small p: termination fails; larger p: termination survives but Weil bounds fail
    for p in (7, 11):
        assert not assemble_U_numerator(bad, p, nadd=5, table=tables["aesz425"]).nadd_ok
    with pytest.raises(IntegrityError):
        compute_prime(bad, 13, table=tables["aesz425"])
    compute_prime(aesz425, 13, table=tables["aesz425"])


def test_k3_conifold_in_denominator_breaks_termination(k3, tables):
    # the documented default exponents (1,1) would put the conifold into D
    alt = dataclasses.replace(k3, denom_exponents=(1, 1))
    assert assemble_U_numerator(k3, 7, nadd=5, table=tables["k3"]).nadd_ok
    assert not assemble_U_numerator(alt, 7, nadd=5, table=tables["k3"]).nadd_ok


def test_modes_agree(quintic, tables):
    nums = [numerator_for_prime(quintic, 11, nadd=2, mode=m, table=tables["quintic"]).numerator
            for m in ("truncated_recurrence", "truncated_rational", "exact_rational")]
    assert nums[0] == nums[1] == nums[2]
