"""Seeded Monte Carlo driver: sample, close, decompose, check, scan, report.

Every trial draws its own Philox stream from ``(seed, n, m, trial)`` so the
output does not depend on the number of workers or on scheduling.  Timing
is kept out of the emitted files unless asked for, which keeps repeated runs
byte-identical.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Sequence

from .census import density_profile, scan_small_dense, K_MAX_LIMIT
from .graph import atomic_write_text
from .numeric.poisson import model_params
from .numeric.special import as_support
from .rotation import HARD_CHECKS, check_structure, choose_v0, decompose_structure, posa_pair
from .sampler import sample_min3_graph, trial_rng

__all__ = [
    "SCHEMA_VERSION",
    "ExperimentConfig",
    "TrialRecord",
    "run_trial",
    "run_trials",
    "emit_report",
    "read_csv_records",
    "run_experiment",
    "load_config_file",
    "census_csv",
]

SCHEMA_VERSION = 1


@dataclass
class ExperimentConfig:
    seed: int
    n_list: Sequence[int] = (1000,)
    c: float | None = 5.4
    m: int | None = None
    trials: int = 10
    v0_policy: str = "greedy"
    dedup: bool = True
    rotation_budget: int | None = None
    k_max: int | None = None
    density_samples: int = 0
    out_dir: str = "out"
    workers: int = 1
    pairing_retries: int = 100
    max_rejects: int = 10**6
    support: str = ">=3"
    record_timing: bool = False

    def __post_init__(self):
        if self.seed is None:
            raise ValueError("a master seed is required")
        self.seed = int(self.seed)
        self.n_list = tuple(int(n) for n in self.n_list)
        if not self.n_list:
            raise ValueError("n_list is empty")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.m is not None and len(self.n_list) > 1:
            raise ValueError("an explicit m needs a single n")
        k = as_support(self.support).min_degree
        for n in self.n_list:
            m = self.edges_for(n)
            if not 2 * m > k * n:
                raise ValueError(f"need m > {k}n/2, got n={n}, m={m}")

    def edges_for(self, n: int) -> int:
        if self.m is not None:
            return int(self.m)
        if self.c is None:
            raise ValueError("give c or m")
        return int(round(self.c * n / 2.0))


@dataclass
class TrialRecord:
    n: int
    m: int
    seed: int
    trial: int
    v0: int = -1
    h: int = 0
    s: int = 0
    t: int = 0
    t1: int = 0
    t2: int = 0
    t3: int = 0
    s2: int = 0
    s3: int = 0
    xi1: int = 0
    xi2: int = 0
    mu1: int = 0
    mu2: int = 0
    e_st: int = 0
    sigma: float = 0.0
    closed: bool = False
    rotations: int = 0
    ratio: float = 0.0
    k_max: int = 0
    dense_witness: bool = False
    witness_size: int = 0
    density_flagged: bool = False
    hard_ok: bool = False
    checks: dict = field(default_factory=dict)
    error: str = ""
    elapsed_ms: float | None = None
    schema_version: int = SCHEMA_VERSION
    density_rows: list = field(default_factory=list, repr=False, compare=False)


# emitted column order; density_rows go to the census file instead
COLUMNS = [f.name for f in fields(TrialRecord) if f.name != "density_rows"]
_BOOL = {"closed", "dense_witness", "density_flagged", "hard_ok"}
_FLOAT = {"sigma", "ratio", "elapsed_ms"}
_STR = {"error"}


def _k_max_for(cfg: ExperimentConfig, p) -> int:
    if cfg.k_max is not None:
        return int(cfg.k_max)
    if p.eps0 is None:
        return 0
    return min(K_MAX_LIMIT, int(math.ceil(p.eps0 * math.log(p.n))))


def run_trial(cfg: ExperimentConfig, n: int, trial: int) -> TrialRecord:
    m = cfg.edges_for(n)
    rec = TrialRecord(n=n, m=m, seed=cfg.seed, trial=trial)
    t0 = time.perf_counter()
    try:
        support = as_support(cfg.support)
        p = model_params(n, m, support)
        rng = trial_rng(cfg.seed, n, m, trial)
        g = sample_min3_graph(n, m, rng, max_rejects=cfg.max_rejects, support=support,
                              pairing_retries=cfg.pairing_retries, lam=p.lam or None)
        v0 = choose_v0(g, cfg.v0_policy, rng)
        path, pair = posa_pair(g, v0, dedup=cfg.dedup, budget=cfg.rotation_budget)
        st = decompose_structure(g, pair)
        rep = check_structure(st, pair, g)
        rec.v0, rec.h = v0, path.h
        for k, v in st.as_dict().items():
            setattr(rec, k, v)
        rec.closed = pair.closed
        rec.rotations = pair.rotations
        rec.checks = rep.as_dict()
        rec.hard_ok = all(rep.results.get(k, True) for k in HARD_CHECKS)
        if p.delta_n is not None:
            rec.ratio = (st.s + st.t) / n ** (1.0 - p.delta_n)
        rec.k_max = _k_max_for(cfg, p)
        w = scan_small_dense(g, rec.k_max)
        rec.dense_witness = w is not None
        rec.witness_size = w.size if w else 0
        if cfg.density_samples > 0 and p.sigma_n is not None:
            prof = density_profile(g, p.sigma_n, p.rho_n, cfg.density_samples, rng,
                                   k_min=max(1, rec.k_max))
            rec.density_rows = prof.rows
            rec.density_flagged = prof.any_flagged
    except Exception as exc:  # recorded per trial, the run goes on
        rec.error = f"{type(exc).__name__}: {exc}"
        rec.closed = False
    rec.elapsed_ms = (time.perf_counter() - t0) * 1e3
    return rec


def _run_one(args):
    cfg, n, trial = args
    return run_trial(cfg, n, trial)


def run_trials(cfg: ExperimentConfig) -> list[TrialRecord]:
    jobs = [(cfg, n, k) for n in cfg.n_list for k in range(cfg.trials)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            out = list(pool.map(_run_one, jobs, chunksize=max(1, len(jobs) // (4 * cfg.workers))))
    else:
        out = [_run_one(j) for j in jobs]
    out.sort(key=lambda r: (r.n, r.trial))
    return out


# -- serialisation --------------------------------------------------------------


def _enc_checks(d: dict) -> str:
    return ";".join(f"{k}={v}" for k, v in d.items())


def _dec_checks(text: str) -> dict:
    if not text:
        return {}
    return dict(part.split("=", 1) for part in text.split(";"))


def _cell(name, value, timing):
    if name == "elapsed_ms" and not timing:
        return ""
    if name == "checks":
        return _enc_checks(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _csv_text(records, timing: bool) -> str:
    buf = io.StringIO()
    buf.write(f"# posa trial records, schema {SCHEMA_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in records:
        w.writerow([_cell(c, getattr(r, c), timing) for c in COLUMNS])
    return buf.getvalue()


def _json_text(records, timing: bool) -> str:
    rows = []
    for r in records:
        d = {c: getattr(r, c) for c in COLUMNS}
        if not timing:
            d.pop("elapsed_ms")
        rows.append(d)
    return json.dumps(rows, indent=1) + "\n"


def _svg_text(records) -> str:
    pts = [(r.n, (r.s + r.t) / r.n) for r in records if not r.error and r.s + r.t > 0]
    ns = [r.n for r in records]
    lo_n, hi_n = min(ns), max(ns)
    if hi_n == lo_n:
        lo_n, hi_n = lo_n / 2, hi_n * 2
    ref_n = [lo_n * (hi_n / lo_n) ** (i / 40) for i in range(41)]
    ref = [(x, x ** -(math.log(math.log(x)) ** -0.5)) for x in ref_n if x >= 16]
    ys = [y for _, y in pts] + [y for _, y in ref]
    lo_y, hi_y = min(ys) / 1.5, min(1.5, max(ys) * 1.5)
    W, H, pad = 640, 420, 50

    def X(x):
        return pad + (W - 2 * pad) * (math.log10(x) - math.log10(lo_n)) / (math.log10(hi_n) - math.log10(lo_n))

    def Y(y):
        return H - pad - (H - 2 * pad) * (math.log10(y) - math.log10(lo_y)) / (math.log10(hi_y) - math.log10(lo_y))

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
           f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
           f'<line x1="{pad}" y1="{H - pad}" x2="{W - pad}" y2="{H - pad}" stroke="black"/>',
           f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{H - pad}" stroke="black"/>',
           f'<text x="{W / 2:.0f}" y="{H - 12}" text-anchor="middle" font-size="12">n (log scale)</text>',
           f'<text x="14" y="{H / 2:.0f}" font-size="12" transform="rotate(-90 14 {H / 2:.0f})" '
           f'text-anchor="middle">(s+t)/n (log scale)</text>']
    poly = " ".join(f"{X(x):.2f},{Y(y):.2f}" for x, y in ref)
    out.append(f'<polyline points="{poly}" fill="none" stroke="#c33" stroke-width="1.5"/>')
    for x, y in pts:
        out.append(f'<circle cx="{X(x):.2f}" cy="{Y(y):.2f}" r="3" fill="#236" fill-opacity="0.6"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_report(records: Sequence[TrialRecord], fmt: str, path: str | os.PathLike,
                timing: bool = False) -> Path:
    """Write ``records`` as csv, json or svg to ``path`` (atomically)."""
    if not records:
        raise ValueError("no records to report")
    if fmt == "csv":
        text = _csv_text(records, timing)
    elif fmt == "json":
        text = _json_text(records, timing)
    elif fmt == "svg":
        text = _svg_text(records)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return atomic_write_text(path, text)


def census_csv(records: Sequence[TrialRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "trial", "k", "max_density_found", "flagged"])
    for r in records:
        for k, dens, flag in r.density_rows:
            w.writerow([r.n, r.trial, k, repr(float(dens)), "true" if flag else "false"])
    return buf.getvalue()


def read_csv_records(path: str | os.PathLike) -> list[TrialRecord]:
    with open(path, encoding="utf-8", newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = list(csv.DictReader(lines))
    out = []
    for row in rows:
        kw = {}
        for c in COLUMNS:
            v = row[c]
            if c == "checks":
                kw[c] = _dec_checks(v)
            elif c in _BOOL:
                kw[c] = v == "true"
            elif c in _FLOAT:
                kw[c] = None if v == "" else float(v)
            elif c in _STR:
                kw[c] = v
            else:
                kw[c] = int(v)
        out.append(TrialRecord(**kw))
    return out


def run_experiment(cfg: ExperimentConfig) -> tuple[list[TrialRecord], dict]:
    """Run all trials and write trials.csv/.json/.svg (and census.csv) under ``out_dir``."""
    records = run_trials(cfg)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {fmt: emit_report(records, fmt, out / f"trials.{fmt}", cfg.record_timing)
             for fmt in ("csv", "json", "svg")}
    if cfg.density_samples > 0:
        paths["census"] = atomic_write_text(out / "census.csv", census_csv(records))
    return records, paths


_CFG_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def parse_config_value(key: str, text: str):
    if key not in _CFG_TYPES:
        raise KeyError(f"unknown config key {key!r}")
    text = text.strip()
    if key == "n_list":
        return tuple(int(float(x)) for x in text.replace(",", " ").split())
    if key in ("dedup", "record_timing"):
        if text.lower() not in ("true", "false", "1", "0", "yes", "no"):
            raise ValueError(f"{key}: expected a boolean, got {text!r}")
        return text.lower() in ("true", "1", "yes")
    if key in ("c",):
        return float(text)
    if key in ("v0_policy", "out_dir", "support"):
        return text
    if text.lower() == "none":
        return None
    return int(float(text))


def load_config_file(path: str | os.PathLike) -> dict:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            k, v = (p.strip() for p in line.split("=", 1))
            out[k] = parse_config_value(k, v)
    return out
