import pytest
from hypothesis import given, strategies as st

from cyzeta.evaluation import CONIFOLD, GOOD, OTHER, EulerFactorRecord
from cyzeta.io import (FormatError, RunManifest, format_log, format_record, parse_log,
                       parse_record, read_log, read_outputs, write_log, write_outputs)
from cyzeta.pipeline import LogEntry, compute_prime


def test_record_lines():
    assert format_record(EulerFactorRecord(7, 2, [25, 350])) == "[7, 2, [25, 350]]"
    assert format_record(EulerFactorRecord(7, 5, [1, 301], CONIFOLD)) == "[7, 5, [1, 301], C]"
    assert format_record(EulerFactorRecord(7, 3, [], OTHER)) == "[7, 3, [], 0]"


def test_log_lines():
    assert format_log(LogEntry(7, 6, 9, False)) == "[7, 6, 9]"
    assert format_log(LogEntry(7, 8, 9, True)) == "[7, 8, 9] WARN"
    assert format_log(LogEntry(7, None, 9, False)) == "[7, ?, 9]"


def test_bad_lines():
    with pytest.raises(FormatError):
        parse_record("[7, 2, 25, 350]")
    with pytest.raises(FormatError):
        parse_log("7 6 9")


records = st.builds(
    lambda p, x, c, f: EulerFactorRecord(p, x, [] if f == OTHER else c, f),
    st.integers(5, 10**7), st.integers(1, 10**7),
    st.lists(st.integers(-10**30, 10**30), min_size=2, max_size=2),
    st.sampled_from([GOOD, CONIFOLD, OTHER]))


@given(records)
def test_record_roundtrip(r):
    assert parse_record(format_record(r)) == r


@given(st.integers(5, 10**7), st.one_of(st.none(), st.integers(0, 10**7)), st.integers(0, 10**7),
       st.booleans())
def test_log_roundtrip(p, d, M, w):
    e = LogEntry(p, d, M, w)
    assert parse_log(format_log(e)) == e


def test_files_are_sorted_and_deterministic(tmp_path, quintic):
    recs = compute_prime(quintic, 11).records + compute_prime(quintic, 7).records
    a = write_outputs(recs, "x", tmp_path)
    first = a.read_text()
    write_outputs(list(reversed(recs)), "x", tmp_path)
    assert a.read_text() == first
    assert a == tmp_path / "outputs" / "outputs_x.txt"
    assert read_outputs(a) == sorted(recs, key=lambda r: (r.p, r.phi_star))
    lp = write_log([LogEntry(11, 8, 9), LogEntry(7, 5, 6)], "x", tmp_path, append=False)
    assert lp == tmp_path / "logs" / "x.log"
    assert [e.p for e in read_log(lp)] == [7, 11]


def test_manifest(tmp_path):
    m = RunManifest("run1", "quintic", 4, 10, acc=8, nadd=2)
    assert RunManifest.read(m.write(tmp_path / "m.json")) == m
    with pytest.raises(ValueError):
        RunManifest("run1", "quintic", 10, 4)
    with pytest.raises(ValueError, match="acc"):
        RunManifest("run1", "quintic", 4, 10, nadd=2)
    with pytest.raises(ValueError):
        RunManifest("a/b", "quintic", 4, 10)
