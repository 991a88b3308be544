from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cyzeta.padic import ord_p
from cyzeta.recurrence import (accuracy_bound, default_shift, division_count, run_exact_recurrence,
                               run_truncated_recurrence, target_accuracy_B)
from oracles import quintic_f0


def test_target_accuracy():
    assert [target_accuracy_B(4, p) for p in (7, 11, 101, 1048573)] == [4, 4, 4, 4]
    assert target_accuracy_B(4, 5) == 5
    assert [target_accuracy_B(3, p) for p in (5, 7, 997)] == [3, 3, 3]


def test_accuracy_bounds():
    assert accuracy_bound(4, Fraction(4, 5), 4) == 8
    assert accuracy_bound(4, Fraction(4, 5), 4, mode="sharp", p=13) == 4
    assert accuracy_bound(3, Fraction(1), 3) == 6


def test_division_count():
    assert division_count(7, 6) == 0
    assert division_count(7, 49) == 8
    assert default_shift(4, 7, 14) == 14


def test_quintic_small_n_is_exact(quintic, tables):
    res = run_truncated_recurrence(quintic, tables["quintic"], 7, 8, 6)
    for n in range(7):
        assert (res.value(0, n) - quintic_f0(n)).numerator % 7**8 == 0


def test_quintic_ledger_at_multiples_of_p(quintic, tables):
    res = run_truncated_recurrence(quintic, tables["quintic"], 7, 8, 14)
    for i in range(4):
        assert res.ledger[i, 6] == 8
        assert res.ledger[i, 7] == 8 - (4 + i)
        # losses accumulate: the second division starts from the first one's floor
        assert res.ledger[i, 14] == res.ledger[i, 13] - (4 + i)


def test_initial_conditions(ops, tables):
    for name, op in ops.items():
        res = run_truncated_recurrence(op, tables[name], 11, 5, 3)
        assert [res.value(i, 0) for i in range(op.b)] == [1] + [0] * (op.b - 1)


@given(st.sampled_from(["quintic", "k3", "aesz425"]), st.sampled_from([7, 11, 13, 17]),
       st.integers(2, 8), st.integers(1, 3))
def test_ledger_is_a_valid_lower_bound(ops, tables, name, p, A, mult):
    # [DERIVED] exact rational periods are the oracle for the truncated ones
    op = ops[name]
    M = mult * p + 2
    res = run_truncated_recurrence(op, tables[name], p, A, M)
    exact = run_exact_recurrence(op, tables[name], op.b - 1, M)
    for i in range(op.b):
        for n in range(M + 1):
            d = exact[i][n] - res.value(i, n)
            v = ord_p(d, p)
            assert v is None or v >= res.ledger[i, n], (i, n, v, res.ledger[i, n])
            # the ledger never claims more than A
            assert res.ledger[i, n] <= A
