"""Run configuration and suite reports (JSON, CSV, plain text)."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

from . import __version__
from .quadrature import normalize_resolution

STATUSES = ("pass", "fail", "refused")


def parse_resolution(text: str | None):
    """``"32x32x24"`` (also ``*`` or the multiplication sign) to a tuple of ints."""
    if text is None or text == "" or text == "default":
        return None
    if isinstance(text, (tuple, list)):
        return tuple(int(v) for v in text)
    parts = str(text).replace("×", "x").replace("*", "x").lower().split("x")
    return tuple(int(p) for p in parts)


def format_resolution(res) -> str:
    if res is None:
        return "default"
    if isinstance(res, int):
        return str(res)
    return "x".join(str(int(v)) for v in res)


@dataclass
class RunConfig:
    n: int = 2
    R: float = 1.0
    r_max: int = 6
    s_max: int = 4
    q_max: int = 3
    resolution: tuple | None = None
    tol_reproduction: float = 1e-6
    tol_pairing: float = 1e-8
    tol_jump: float = 1e-2
    seed: int = 0
    out: str | None = None

    _INT = ("n", "r_max", "s_max", "q_max", "seed")
    _FLOAT = ("R", "tol_reproduction", "tol_pairing", "tol_jump")

    def validate(self) -> "RunConfig":
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not (self.R > 0 and math.isfinite(self.R)):
            raise ValueError("radius must be positive and finite")
        for name in ("r_max", "s_max", "q_max"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.q_max < 1:
            raise ValueError("q_max must be >= 1")
        for name in ("tol_reproduction", "tol_pairing", "tol_jump"):
            t = getattr(self, name)
            if not (t > 0 and math.isfinite(t)):
                raise ValueError(f"{name} must be positive")
        if self.resolution is not None:
            normalize_resolution(self.n, self.resolution)
        return self

    @property
    def effective_resolution(self):
        return normalize_resolution(self.n, self.resolution)

    def with_overrides(self, **kw) -> "RunConfig":
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data.update({k: v for k, v in kw.items() if v is not None})
        return RunConfig(**data).validate()

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "resolution":
                v = format_resolution(v)
            elif v is None:
                v = ""
            elif isinstance(v, float):
                v = repr(v)
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        data: dict[str, Any] = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line {lineno}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in known:
                raise ValueError(f"config line {lineno}: unknown key {key!r}")
            if key in cls._INT:
                data[key] = int(val)
            elif key in cls._FLOAT:
                data[key] = float(val)
            elif key == "resolution":
                data[key] = parse_resolution(val)
            else:
                data[key] = val or None
        return cls(**data).validate()

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        return cls.from_text(Path(path).read_text())


def digest(inputs: dict) -> str:
    blob = json.dumps(inputs, sort_keys=True, default=str, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _num(x) -> list | float | None:
    if x is None:
        return None
    x = complex(x)
    return [x.real, x.imag]


@dataclass
class CheckRecord:
    id: str
    inputs_digest: str
    provenance: str
    value: complex | None
    expected: complex | None
    tolerance: float | None
    status: str
    detail: str = ""

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"status must be one of {STATUSES}")
        self.value = None if self.value is None else complex(self.value)
        self.expected = None if self.expected is None else complex(self.expected)
        self.tolerance = None if self.tolerance is None else float(self.tolerance)

    def to_json(self) -> dict:
        return {"id": self.id, "inputs_digest": self.inputs_digest, "provenance": self.provenance,
                "value": _num(self.value), "expected": _num(self.expected),
                "tolerance": self.tolerance, "status": self.status, "pass": self.status == "pass",
                "detail": self.detail}


@dataclass
class SuiteReport:
    suite: str
    records: list = field(default_factory=list)
    environment: dict = field(default_factory=dict)
    wall_time: float | None = None
    tables: dict = field(default_factory=dict, repr=False)

    @property
    def passed(self) -> bool:
        return all(r.status != "fail" for r in self.records)

    def refusals(self) -> int:
        return sum(r.status == "refused" for r in self.records)

    def failures(self) -> int:
        return sum(r.status == "fail" for r in self.records)

    def exit_code(self, strict: bool = False) -> int:
        if self.failures() or (strict and self.refusals()):
            return 1
        return 0


def environment_stamp(cfg: RunConfig) -> dict:
    return {"version": __version__, "seed": cfg.seed, "n": cfg.n, "R": cfg.R,
            "resolution": format_resolution(cfg.effective_resolution)}


CSV_COLUMNS = ("id", "inputs_digest", "provenance", "value_re", "value_im", "expected_re",
               "expected_im", "tolerance", "status", "detail")


def _g(x: float | None) -> str:
    return "" if x is None else "%.17g" % x


def emit_report(report: SuiteReport, fmt: str = "json", timing: bool = False) -> str:
    """Serialize deterministically; wall time is included only when ``timing`` is set."""
    if fmt == "json":
        doc = {"suite": report.suite, "environment": report.environment,
               "records": [r.to_json() for r in report.records], "pass": report.passed,
               "counts": {s: sum(r.status == s for r in report.records) for s in STATUSES}}
        if timing and report.wall_time is not None:
            doc["wall_time"] = report.wall_time
        return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(CSV_COLUMNS)
        for r in report.records:
            v = r.value if r.value is not None else None
            e = r.expected if r.expected is not None else None
            wr.writerow([r.id, r.inputs_digest, r.provenance,
                         _g(None if v is None else v.real), _g(None if v is None else v.imag),
                         _g(None if e is None else e.real), _g(None if e is None else e.imag),
                         _g(r.tolerance), r.status, r.detail])
        return buf.getvalue()
    if fmt == "human":
        out = [f"suite {report.suite}: {'PASS' if report.passed else 'FAIL'} "
               f"({len(report.records)} checks, {report.failures()} failed, {report.refusals()} refused)"]
        env = ", ".join(f"{k}={report.environment[k]}" for k in sorted(report.environment))
        out.append(f"  environment: {env}")
        if timing and report.wall_time is not None:
            out.append(f"  wall time: {report.wall_time:.2f} s")
        width = max((len(r.id) for r in report.records), default=10)
        for r in report.records:
            val = "-" if r.value is None else _short(r.value)
            exp = "-" if r.expected is None else _short(r.expected)
            tol = "-" if r.tolerance is None else f"{r.tolerance:.1e}"
            line = f"  {r.status.upper():7s} {r.id:<{width}s}  value={val}  expected={exp}  tol={tol}"
            if r.detail:
                line += f"  [{r.detail}]"
            out.append(line)
        return "\n".join(out) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def _short(z: complex) -> str:
    if z.imag == 0:
        return "%.17g" % z.real
    return "%.17g%+.17gj" % (z.real, z.imag)


def parse_csv_report(text: str) -> list[CheckRecord]:
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        def cx(a, b):
            return None if rec[a] == "" else complex(float(rec[a]), float(rec[b]))
        out.append(CheckRecord(rec["id"], rec["inputs_digest"], rec["provenance"],
                               cx("value_re", "value_im"), cx("expected_re", "expected_im"),
                               None if rec["tolerance"] == "" else float(rec["tolerance"]),
                               rec["status"], rec["detail"]))
    return out


def write_report(text: str, path: str | Path | None) -> None:
    if path is None or str(path) == "-":
        import sys
        sys.stdout.write(text)
        return
    Path(path).write_text(text)
