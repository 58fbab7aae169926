"""Scaling study over an (n, p) grid on the explicit Hadamard factorization."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DegenerateInput, LabError
from .factorization import build_explicit_factorization
from .quasinorm import check_p, norm_P_linf_to_lp_exact
from .signs import clamped_log
from .witness import lower_bound_from_witness, search_witness

log = logging.getLogger(__name__)

CSV_HEADER = ["n", "K", "p", "upper_formula", "exact_norm_P", "witness_sup_w",
              "witness_ratio", "lower_bound", "lower_bound_adj"]


@dataclass
class StudyConfig:
    n_grid: list[int] = field(default_factory=lambda: [8, 16, 32, 64, 128])
    p_list: list[float] = field(default_factory=lambda: [0.5, 1.0])
    tries_per_cell: int = 64
    seed: int = 0
    exact_norm_max_K: int = 16
    output_path: str = "study.csv"

    def __post_init__(self):
        self.n_grid = [int(n) for n in self.n_grid]
        self.p_list = [check_p(p) for p in self.p_list]
        if not self.n_grid:
            raise ValueError("n_grid must be nonempty")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ValueError("n_grid must be strictly ascending")
        if self.n_grid[0] < 1:
            raise ValueError("n_grid entries must be >= 1")
        if self.tries_per_cell < 1:
            raise ValueError("tries_per_cell must be >= 1")

    @classmethod
    def from_json_file(cls, path: str, **overrides) -> "StudyConfig":
        with open(path) as fh:
            data = json.load(fh)
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)


@dataclass
class StudyRow:
    n: int
    K: int
    p: float
    upper_formula: float
    exact_norm_P: float | None = None
    witness_sup_w: float | None = None
    witness_ratio: float | None = None
    lower_bound: float | None = None
    lower_bound_adj: float | None = None

    @property
    def failed(self) -> bool:
        return self.witness_sup_w is None


@dataclass
class StudyResult:
    rows: list[StudyRow]
    lower_slopes: dict[float, tuple[float, float, float]]
    upper_slopes: dict[float, tuple[float, float, float]]


def fit_loglog_slope(points) -> tuple[float, float, float]:
    """Least-squares line through (ln x, ln y); returns (slope, intercept, r^2)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise DegenerateInput("need at least two points")
    if np.any(pts <= 0):
        raise ValueError("log-log fit needs positive coordinates")
    lx, ly = np.log(pts[:, 0]), np.log(pts[:, 1])
    if np.ptp(lx) == 0:
        raise DegenerateInput("all x values are equal")
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return float(slope), float(intercept), r2


def _cell_seed(seed: int, n: int, p_index: int) -> int:
    return int(np.random.SeedSequence([seed, n, p_index]).generate_state(1)[0])


def run_cell(n: int, p: float, cfg: StudyConfig, p_index: int) -> StudyRow:
    F = build_explicit_factorization(n, p)
    row = StudyRow(n=n, K=F.K, p=p, upper_formula=float(n) ** (1.0 / p - 0.5))
    if F.K <= cfg.exact_norm_max_K:
        row.exact_norm_P = norm_P_linf_to_lp_exact(F.P, p, max_K=cfg.exact_norm_max_K)
    try:
        wres = search_witness(F, cfg.tries_per_cell, _cell_seed(cfg.seed, n, p_index))
    except LabError as exc:
        log.warning("cell n=%d p=%g failed: %s", n, p, exc)
        return row
    row.witness_sup_w = wres.sup_w
    row.witness_ratio = wres.ratio
    row.lower_bound = lower_bound_from_witness(F, wres)
    row.lower_bound_adj = row.lower_bound * math.sqrt(clamped_log(n))
    return row


def run_scaling_study(cfg: StudyConfig, write: bool = True) -> StudyResult:
    rows = []
    for j, p in enumerate(cfg.p_list):
        for n in cfg.n_grid:
            rows.append(run_cell(n, p, cfg, j))
            log.info("n=%d p=%g done", n, p)
    lower, upper = {}, {}
    for p in cfg.p_list:
        ok = [r for r in rows if r.p == p and not r.failed]
        if len({r.n for r in ok}) >= 2:
            lower[p] = fit_loglog_slope([(r.n, r.lower_bound_adj) for r in ok])
        cells = [r for r in rows if r.p == p]
        if len(cells) >= 2:
            upper[p] = fit_loglog_slope([(r.n, r.upper_formula) for r in cells])
    if write:
        with open(cfg.output_path, "w", newline="") as fh:
            fh.write(rows_to_csv(rows))
    return StudyResult(rows=rows, lower_slopes=lower, upper_slopes=upper)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def rows_to_csv(rows: list[StudyRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        d = asdict(r)
        writer.writerow([_fmt(d[k]) for k in CSV_HEADER])
    return buf.getvalue()


def read_csv(path: str) -> list[StudyRow]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {reader.fieldnames}")
        out = []
        for rec in reader:
            vals = {k: (None if rec[k] == "" else float(rec[k])) for k in CSV_HEADER}
            vals["n"] = int(vals["n"])
            vals["K"] = int(vals["K"])
            out.append(StudyRow(**vals))
        return out
