"""Output, log and manifest files.

Output lines are tuples ``[p, phi*, [a1, a2]]``, with a trailing ``, C``
for conifold points and ``, 0`` (and an empty list) for other singular
points.  Log lines are ``[p, trunc_deg, M]`` plus `` WARN`` when the
termination checks failed; an unknown degree is written as ``?``.
"""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass
from pathlib import Path

from .evaluation import CONIFOLD, GOOD, OTHER, EulerFactorRecord
from .pipeline import LogEntry


class FormatError(ValueError):
    pass


def format_record(rec: EulerFactorRecord) -> str:
    coeffs = "[" + ", ".join(str(a) for a in rec.coeffs) + "]"
    if rec.flag == GOOD:
        return f"[{rec.p}, {rec.phi_star}, {coeffs}]"
    if rec.flag == CONIFOLD:
        return f"[{rec.p}, {rec.phi_star}, {coeffs}, C]"
    return f"[{rec.p}, {rec.phi_star}, [], 0]"


_REC = re.compile(r"^\[(\d+), (\d+), \[([-\d, ]*)\](?:, (C|0))?\]$")


def parse_record(line: str) -> EulerFactorRecord:
    m = _REC.match(line.strip())
    if not m:
        raise FormatError(f"not an output record: {line!r}")
    p, x, body, flag = m.groups()
    coeffs = [int(t) for t in body.split(",")] if body.strip() else []
    kind = {None: GOOD, "C": CONIFOLD, "0": OTHER}[flag]
    return EulerFactorRecord(int(p), int(x), coeffs, kind)


def output_path(label: str, outdir: str | Path = ".") -> Path:
    return Path(outdir) / "outputs" / f"outputs_{label}.txt"


def log_path(label: str, outdir: str | Path = ".") -> Path:
    return Path(outdir) / "logs" / f"{label}.log"


def write_outputs(records, label: str, outdir: str | Path = ".", path: Path | None = None) -> Path:
    records = sorted(records, key=lambda r: (r.p, r.phi_star))
    path = Path(path) if path else output_path(label, outdir)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(format_record(r) + "\n" for r in records))
    return path


def read_outputs(path: str | Path) -> list[EulerFactorRecord]:
    out = []
    for line in Path(path).read_text().splitlines():
        if line.strip():
            out.append(parse_record(line))
    return out


def format_log(entry: LogEntry) -> str:
    deg = "?" if entry.trunc_deg is None else str(entry.trunc_deg)
    line = f"[{entry.p}, {deg}, {entry.M}]"
    return line + " WARN" if entry.warn else line


_LOG = re.compile(r"^\[(\d+), (\d+|\?), (\d+)\]( WARN)?$")


def parse_log(line: str) -> LogEntry:
    m = _LOG.match(line.strip())
    if not m:
        raise FormatError(f"not a log line: {line!r}")
    p, d, M, w = m.groups()
    return LogEntry(int(p), None if d == "?" else int(d), int(M), w is not None)


def write_log(entries, label: str, outdir: str | Path = ".", path: Path | None = None,
              append: bool = True) -> Path:
    path = Path(path) if path else log_path(label, outdir)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "a" if append else "w") as fh:
        for e in sorted(entries, key=lambda e: e.p):
            fh.write(format_log(e) + "\n")
    return path


def read_log(path: str | Path) -> list[LogEntry]:
    return [parse_log(l) for l in Path(path).read_text().splitlines() if l.strip()]


@dataclass
class RunManifest:
    label: str
    operator: str
    n_min: int
    n_max: int
    scaling: str | None = None
    acc: int | None = None
    nadd: int = 0
    outdir: str = "."
    database: str | None = None
    workers: int = 1

    def __post_init__(self):
        if self.n_min < 1 or self.n_min > self.n_max:
            raise ValueError("prime range must satisfy 1 <= n_min <= n_max")
        if self.nadd < 0:
            raise ValueError("nadd must be nonnegative")
        if self.nadd > 0 and self.acc is None:
            raise ValueError("nadd > 0 requires an explicit accuracy (acc)")
        if self.workers < 1:
            raise ValueError("workers must be positive")
        if not re.fullmatch(r"[\w.-]+", self.label):
            raise ValueError(f"label {self.label!r} must be a plain file-name token")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> RunManifest:
        return cls(**json.loads(text))

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json() + "\n")
        return path

    @classmethod
    def read(cls, path: str | Path) -> RunManifest:
        return cls.from_json(Path(path).read_text())
