import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

from cyzeta import derive_recurrence, get_operator  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

SMALL_PRIMES = [7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]


@pytest.fixture(scope="session")
def quintic():
    return get_operator("quintic")


@pytest.fixture(scope="session")
def k3():
    return get_operator("k3")


@pytest.fixture(scope="session")
def aesz425():
    return get_operator("aesz425")


@pytest.fixture(scope="session")
def ops(quintic, k3, aesz425):
    return {"quintic": quintic, "k3": k3, "aesz425": aesz425}


@pytest.fixture(scope="session")
def tables(ops):
    return {name: derive_recurrence(op) for name, op in ops.items()}


ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, note = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}  {note}")
