import pytest

from cyzeta.cli import main
from cyzeta.io import read_log, read_outputs


def test_compute_quintic_p7(tmp_path, capsys):
    assert main(["compute", "--operator", "quintic", "--primes", "4:4", "--label", "q",
                 "--outdir", str(tmp_path)]) == 0
    recs = read_outputs(tmp_path / "outputs" / "outputs_q.txt")
    assert len(recs) == 6
    assert [r.phi_star for r in recs if r.flag == "C"] == [5]
    assert [(e.p, e.M) for e in read_log(tmp_path / "logs" / "q.log")] == [(7, 6)]


def test_compute_is_worker_independent(tmp_path):
    outs = []
    for w in (1, 2):
        d = tmp_path / f"w{w}"
        assert main(["compute", "--operator", "k3", "--primes", "3:12", "--label", "k",
                     "--outdir", str(d), "--workers", str(w)]) == 0
        outs.append((d / "outputs" / "outputs_k.txt").read_bytes())
    assert outs[0] == outs[1]


def test_refused_primes_are_reported(tmp_path, capsys):
    assert main(["compute", "--operator", "quintic", "--primes", "1:3", "--label", "q",
                 "--outdir", str(tmp_path)]) == 0
    err = capsys.readouterr().err
    assert "p=2" in err and "p=5" in err


def test_validate(capsys):
    assert main(["validate", "--operator", "k3", "--depth", "10"]) == 0
    assert "self_duality: pass" in capsys.readouterr().out


def test_stats_and_exports(tmp_path, capsys):
    assert main(["compute", "--operator", "aesz425", "--primes", "3:20", "--label", "a",
                 "--outdir", str(tmp_path)]) == 0
    out = str(tmp_path / "outputs" / "outputs_a.txt")
    assert main(["stats", "--inputs", out, "--point=-1", "--primes", "10"]) == 0
    assert "nearest" in capsys.readouterr().out
    for fmt in ("native", "euler", "hecke", "histogram"):
        assert main(["export", "--inputs", out, "--format", fmt, "--point=-1",
                     "--out", str(tmp_path / f"x_{fmt}.txt")]) == 0
    hecke = (tmp_path / "x_hecke.txt").read_text().splitlines()
    assert hecke[0] == "p lambda1 lambda2" and len(hecke) > 10
    euler = (tmp_path / "x_euler.txt").read_text().splitlines()
    p, *a = map(int, euler[0].split())
    assert a[0] == 1 and a[4] == p**6
    assert (tmp_path / "x_native.txt").read_text() == (tmp_path / "outputs" / "outputs_a.txt").read_text()


def test_bench(tmp_path, capsys):
    assert main(["bench", "--operator", "quintic", "--primes", "4:6", "--csv", str(tmp_path / "b.csv")]) == 0
    assert len((tmp_path / "b.csv").read_text().splitlines()) == 1 + 3 * 3


def test_errors_exit_nonzero(capsys):
    assert main(["compute", "--operator", "nope", "--primes", "4:4", "--label", "q"]) != 0
    assert main(["compute", "--operator", "quintic", "--primes", "4:4", "--label", "q", "--nadd", "3"]) != 0
    with pytest.raises(SystemExit):
        main(["frobnicate"])
