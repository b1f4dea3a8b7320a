"""Exceptional-set scan: R_s(n) against the main term over dyadic blocks.

n is exceptional when |R_s(n) - main(n)| > n^(s/4) / psi(n).  Blocks are
(X/2, X] for X a power of two; each block reports its size, exceptional
count, median relative deviation, the n with a tiny singular series, and
psi(X).  Cumulative counts over 1 <= n <= X are reported next to the
dyadic ones.
"""
from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InsufficientDataError
from .repcount import sieve_representations
from .singular import C_CONSTANTS, GAMMA54_POW4, SCAN_QMAX, main_term_array, qsum_many

SCAN_LIMIT = 1 << 24
NEAR_ZERO = 0.01
THEOREM_EXPONENTS = {3: 3 / 8, 4: 1 / 8}
CSV_COLUMNS = ("n", "R", "singular", "main", "rel_dev", "exceptional")
ALL_CLEAR = "all-clear"
_RECORD_FIELDS = ("n", "R", "singular", "main", "rel_dev", "exceptional", "borderline", "trivial", "tail")


@dataclass(frozen=True)
class PsiSpec:
    """psi(t) = t^delta ("pow"), (log t)^e ("logpow") or c ("const")."""

    family: str
    param: float

    def __post_init__(self):
        if self.family not in ("pow", "logpow", "const"):
            raise ValueError(f"unknown psi family {self.family!r}")
        if not self.param > 0:
            raise ValueError("psi parameter must be positive")
        if self.family == "pow" and self.param > 0.25:
            raise ValueError("pow:delta needs delta <= 0.25")

    @classmethod
    def parse(cls, text: str) -> "PsiSpec":
        m = re.fullmatch(r"\s*(pow|logpow|const)\s*:\s*([0-9.eE+-]+)\s*", text)
        if not m:
            raise ValueError(f"bad psi spec {text!r}; expected pow:D, logpow:E or const:C")
        return cls(m.group(1), float(m.group(2)))

    def __str__(self):
        return f"{self.family}:{self.param!r}"

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        if self.family == "pow":
            return t**self.param
        if self.family == "logpow":
            # (log t)^e degenerates below t = 2; hold it at its value there
            return np.log(np.maximum(t, 2.0)) ** self.param
        return np.full(t.shape, self.param) if t.shape else np.float64(self.param)


@dataclass(frozen=True)
class DeviationRecord:
    n: int
    R: int
    main: float
    singular: float
    relative_deviation: float
    exceptional: bool
    borderline: bool = False
    trivial: bool = False


@dataclass
class BlockSummary:
    X: int
    count: int
    exceptional: int
    borderline: int
    median_rel: float
    near_zero: list
    psi_at_X: float
    cumulative: int

    def as_dict(self) -> dict:
        return {
            "X": self.X, "count": self.count, "exceptional": self.exceptional,
            "borderline": self.borderline, "median_rel": self.median_rel,
            "near_zero": list(self.near_zero), "psi_at_X": self.psi_at_X, "cumulative": self.cumulative,
        }


@dataclass(eq=False)
class ScanReport:
    s: int
    psi: PsiSpec
    x_min: int
    x_max: int
    q_max: int
    columns: dict = field(repr=False)
    ranges: list = field(default_factory=list)
    version: str = __version__

    def __len__(self):
        return int(self.columns["n"].shape[0])

    def record(self, i: int) -> DeviationRecord:
        c = self.columns
        return DeviationRecord(
            int(c["n"][i]), int(c["R"][i]), float(c["main"][i]), float(c["singular"][i]),
            float(c["rel_dev"][i]), bool(c["exceptional"][i]), bool(c["borderline"][i]), bool(c["trivial"][i]),
        )

    def records(self):
        return [self.record(i) for i in range(len(self))]

    @property
    def exceptional_count(self) -> int:
        return int(self.columns["exceptional"].sum())

    @property
    def fitted_exponent(self):
        try:
            return fit_exponent(self)
        except InsufficientDataError:
            return None

    def provenance(self) -> dict:
        return {
            "s": self.s, "psi": str(self.psi), "x_min": self.x_min, "x_max": self.x_max,
            "q_max": self.q_max, "singular_method": "qsum", "version": self.version,
            "criterion": "|R - main| > n^(s/4) / psi(n)", "near_zero": NEAR_ZERO,
        }

    def __eq__(self, other):
        if not isinstance(other, ScanReport):
            return NotImplemented
        same = (self.s, self.psi, self.x_min, self.x_max, self.q_max, self.version) == (
            other.s, other.psi, other.x_min, other.x_max, other.q_max, other.version)
        if not same or [r.as_dict() for r in self.ranges] != [r.as_dict() for r in other.ranges]:
            return False
        return all(np.array_equal(self.columns[k], other.columns[k]) for k in _RECORD_FIELDS)


def _check_range(x_min: int, x_max: int) -> None:
    def pow2(x):
        return x > 0 and x & (x - 1) == 0

    if not (x_min == 0 or pow2(x_min)) or not pow2(x_max) or x_max <= x_min:
        raise ValueError("scan range (x_min, x_max] must have x_min in {0, 2^i} and x_max = 2^j > x_min")
    if x_max > SCAN_LIMIT:
        raise ValueError(f"x_max={x_max} exceeds the per-n scan limit 2^24")


def scan(s: int, x_min: int, x_max: int, psi: PsiSpec, q_max: int = SCAN_QMAX, threads: int = 1) -> ScanReport:
    _check_range(x_min, x_max)
    table = sieve_representations(s, x_max)
    n = np.arange(x_min + 1, x_max + 1, dtype=np.int64)
    R = table.counts[x_min + 1 :].copy()
    singular, tail = qsum_many(s, n, q_max, threads=threads)
    main = main_term_array(s, n, singular)
    scale = n.astype(np.float64) ** (s / 4)
    rel = np.abs(R - main) / scale
    threshold = 1.0 / psi(n.astype(np.float64))
    exceptional = rel > threshold
    # truncating the q-sum moves rel_dev by at most c_s Gamma^4 * tail
    borderline = np.abs(rel - threshold) <= C_CONSTANTS[s] * GAMMA54_POW4 * tail
    cols = {
        "n": n, "R": R, "singular": singular, "main": main, "rel_dev": rel,
        "exceptional": exceptional, "borderline": borderline, "trivial": n < s + 2, "tail": tail,
    }
    report = ScanReport(s, psi, x_min, x_max, q_max, cols)
    report.ranges = _aggregate(report)
    return report


def _aggregate(report: ScanReport) -> list:
    c = report.columns
    out = []
    running = 0
    X = 2 * report.x_min if report.x_min else 1
    while X <= report.x_max:
        # n in (X/2, X] sits at column index n - x_min - 1
        sel = slice(X // 2 - report.x_min, X - report.x_min)
        exc = int(c["exceptional"][sel].sum())
        running += exc
        out.append(BlockSummary(
            X=X, count=int(c["n"][sel].shape[0]), exceptional=exc,
            borderline=int(c["borderline"][sel].sum()),
            median_rel=float(np.median(c["rel_dev"][sel])),
            near_zero=[int(v) for v in c["n"][sel][c["singular"][sel] < NEAR_ZERO]],
            psi_at_X=float(report.psi(float(X))), cumulative=running,
        ))
        X *= 2
    return out


def fit_exponent_from_counts(xs, counts):
    """Least-squares slope of log2(count) on log2(X), over blocks with count > 0."""
    xs = np.asarray(xs, dtype=np.float64)
    counts = np.asarray(counts, dtype=np.float64)
    if counts.size and not counts.any():
        return ALL_CLEAR
    keep = counts > 0
    if keep.sum() < 3:
        raise InsufficientDataError("need at least 3 dyadic blocks with exceptional n")
    return float(np.polyfit(np.log2(xs[keep]), np.log2(counts[keep]), 1)[0])


def fit_exponent(report: ScanReport):
    return fit_exponent_from_counts([b.X for b in report.ranges], [b.exceptional for b in report.ranges])


# ---------------------------------------------------------------- export


def _fmt(x: float) -> str:
    return repr(float(x))


def report_to_csv(report: ScanReport) -> str:
    buf = io.StringIO()
    for key, val in report.provenance().items():
        buf.write(f"# {key}={val}\n")
    c = report.columns
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for i in range(len(report)):
        w.writerow((int(c["n"][i]), int(c["R"][i]), _fmt(c["singular"][i]), _fmt(c["main"][i]),
                    _fmt(c["rel_dev"][i]), int(c["exceptional"][i])))
    return buf.getvalue()


def report_to_dict(report: ScanReport) -> dict:
    c = report.columns
    fit = report.fitted_exponent
    return {
        "provenance": report.provenance(),
        "theorem_exponent": THEOREM_EXPONENTS[report.s],
        "fitted_exponent": fit,
        "ranges": [b.as_dict() for b in report.ranges],
        "records": {k: [v.item() for v in c[k]] for k in _RECORD_FIELDS},
    }


def export_report(report: ScanReport, path, format: str = "csv") -> None:
    if format == "csv":
        text = report_to_csv(report)
    elif format == "json":
        text = json.dumps(report_to_dict(report), indent=1) + "\n"
    else:
        raise ValueError(f"unknown format {format!r}")
    Path(path).write_text(text)


_DTYPES = {"n": np.int64, "R": np.int64, "singular": np.float64, "main": np.float64, "rel_dev": np.float64,
           "exceptional": bool, "borderline": bool, "trivial": bool, "tail": np.float64}


def import_report(path) -> ScanReport:
    """Rebuild a ScanReport from its JSON export."""
    d = json.loads(Path(path).read_text())
    p = d["provenance"]
    cols = {k: np.asarray(d["records"][k], dtype=_DTYPES[k]) for k in _RECORD_FIELDS}
    ranges = [BlockSummary(**r) for r in d["ranges"]]
    return ScanReport(p["s"], PsiSpec.parse(p["psi"]), p["x_min"], p["x_max"], p["q_max"], cols, ranges, p["version"])


def read_csv_records(path):
    """(provenance dict, rows) from a CSV export; rows are dicts keyed by column."""
    prov, body = {}, []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            prov[key] = val
        else:
            body.append(line)
    rows = list(csv.DictReader(body))
    return prov, rows
