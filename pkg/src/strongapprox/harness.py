"""Sweeps over (pair, function, point, n), verdicts, CSV output and pair checks."""

from __future__ import annotations

import csv
import logging
import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from . import characteristics as ch
from . import nfunction as nf
from .fourier import CORPUS_IDS, Label, coefficients, get_function
from .strongmeans import rhs_inner, safe_ratio, strong_means

log = logging.getLogger(__name__)

SCHEMA_VERSION = "1"
ROW_COLUMNS = (
    "schema_version", "pair_id", "fn_id", "x", "label", "n", "delta",
    "w1", "wpsi", "g12", "g1psi", "m_diag",
    "h_phi", "rhs_thm", "rhs_proof_k2", "rhs_proof_k32",
    "ratio_h_over_g", "ratio_h_over_rhs", "decay_flag", "cell_flag",
)
SUMMARY_COLUMNS = (
    "schema_version", "pair_id", "fn_id", "x", "label",
    "corollary1_decay", "domination_bounded", "negative_control",
    "h_first", "h_tail_max", "rhs_first", "rhs_tail_max",
    "dom_max", "dom_min", "dom_spread",
    "decay_factor", "negative_factor", "dom_spread_max", "dom_n_min", "zero_floor",
)
_FLOAT_COLUMNS = {"x", "delta", "w1", "wpsi", "g12", "g1psi", "m_diag", "h_phi", "rhs_thm",
                  "rhs_proof_k2", "rhs_proof_k32", "ratio_h_over_g", "ratio_h_over_rhs"}
DEFAULT_N_GRID = tuple(2 ** m - 1 for m in range(2, 11))


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Tolerances:
    quad_rtol: float = 1e-9
    inv_atol: float = 1e-12
    decay_factor: float = 0.2
    negative_factor: float = 0.25
    dom_spread_max: float = 2.0
    dom_n_min: int = 63
    zero_floor: float = 1e-10
    tail_points: int = 3


@dataclass
class ExperimentConfig:
    pair_ids: list = field(default_factory=lambda: ["exp"])
    fn_ids: list = field(default_factory=lambda: list(CORPUS_IDS))
    n_grid: list = field(default_factory=lambda: list(DEFAULT_N_GRID))
    # fn_id -> list of (x, label); functions missing here use their labeled points
    points: dict = field(default_factory=dict)
    tolerances: Tolerances = field(default_factory=Tolerances)
    output_path: str = "sweep.csv"

    def validate(self):
        if not self.pair_ids or not self.fn_ids or not self.n_grid:
            raise ConfigError("pairs, functions and n_grid must be non-empty")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])) or self.n_grid[0] < 0:
            raise ConfigError("n_grid must be strictly increasing and nonnegative")
        if not 0 < self.tolerances.decay_factor < 1:
            raise ConfigError("decay_factor must lie in (0, 1)")
        for pid in self.pair_ids:
            try:
                nf.get_pair(pid)
            except (KeyError, ValueError, OSError) as exc:
                raise ConfigError(f"pair {pid!r}: {exc}") from exc
        for fid in list(self.fn_ids) + list(self.points):
            try:
                get_function(fid)
            except (KeyError, ValueError, OSError) as exc:
                raise ConfigError(f"function {fid!r}: {exc}") from exc
        for fid in self.points:
            if fid not in self.fn_ids:
                raise ConfigError(f"points given for {fid!r}, which is not in functions")

    def cells(self):
        """(pair_id, fn_id, x, label) in report order."""
        out = []
        for pid in self.pair_ids:
            for fid in self.fn_ids:
                if fid in self.points:
                    pts = self.points[fid]
                else:
                    pts = [(p.x, p.label.value) for p in get_function(fid).labeled_points]
                for x, label in pts:
                    out.append((pid, fid, float(x), label))
        return sorted(out, key=lambda c: (c[0], c[1], c[2]))


_X_RE = re.compile(r"^\s*(-?)\s*(\d*\.?\d*(?:[eE][-+]?\d+)?)\s*\*?\s*(pi)?\s*(?:/\s*(\d+\.?\d*))?\s*$")


def parse_x(text):
    """Float, or a multiple of pi such as "pi", "-pi/2", "2*pi/3"."""
    m = _X_RE.match(text)
    if not m or (not m.group(2) and not m.group(3)):
        raise ConfigError(f"cannot parse point {text!r}")
    sign, coef, pi, den = m.groups()
    val = float(coef) if coef else 1.0
    if pi:
        val *= math.pi
    if den:
        val /= float(den)
    return -val if sign else val


def _split(value):
    return [v.strip() for v in value.split(",") if v.strip()]


def apply_settings(cfg, settings):
    """Update a config from flat key/value strings."""
    tol = asdict(cfg.tolerances)
    for key, value in settings.items():
        if key in ("pairs", "pair"):
            cfg.pair_ids = _split(value)
        elif key in ("functions", "fn"):
            cfg.fn_ids = _split(value)
        elif key == "n_grid":
            cfg.n_grid = [int(v) for v in _split(value)]
        elif key == "nmax":
            nmax = int(value)
            cfg.n_grid = [n for n in DEFAULT_N_GRID if n <= nmax] or [nmax]
        elif key == "points":
            pts = {}
            for item in _split(value):
                parts = item.split(":")
                if len(parts) not in (2, 3):
                    raise ConfigError(f"point spec {item!r} is not fn:x[:label]")
                label = parts[2] if len(parts) == 3 else "unlabeled"
                pts.setdefault(parts[0], []).append((parse_x(parts[1]), label))
            cfg.points = pts
        elif key in ("output", "output_path"):
            cfg.output_path = value
        elif key in tol:
            tol[key] = type(tol[key])(float(value)) if isinstance(tol[key], int) else float(value)
        else:
            raise ConfigError(f"unknown config key {key!r}")
    cfg.tolerances = Tolerances(**tol)
    return cfg


def load_config(path):
    """Read a flat ``key = value`` file ('#' starts a comment)."""
    settings = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = line.split("=", 1)
        settings[key.strip()] = value.strip()
    return apply_settings(ExperimentConfig(), settings)


# -- sweep -------------------------------------------------------------------

def compute_cell(pair, f, x, label, n_grid, tol):
    """All rows for one (pair, f, x)."""
    rows = []
    n_max = max(n_grid)
    kw = {"rtol": tol.quad_rtol}
    coef = coefficients(f, n_max)
    h = strong_means(pair, f, x, n_grid, coef=coef, atol=tol.inv_atol)
    m_run = ch.m_profile(pair, f, x, n_max, **kw)
    for n, h_n in zip(n_grid, h):
        c = ch.partition_characteristics(pair, f, x, n, inv_atol=tol.inv_atol, **kw)
        prefix = np.cumsum(c["psi_blocks"])
        rhs = {v: float(pair.psi.inverse(rhs_inner(pair, prefix, n, v), atol=tol.inv_atol))
               for v in ("thm", "proof_k2", "proof_k32")}
        r_g, flag_g = safe_ratio(float(h_n), c["g1psi"], tol.zero_floor)
        r_r, flag_r = safe_ratio(float(h_n), rhs["thm"], tol.zero_floor)
        rows.append({
            "schema_version": SCHEMA_VERSION, "pair_id": pair.pair_id, "fn_id": f.id,
            "x": x, "label": label, "n": n, "delta": c["delta"],
            "w1": c["w1"], "wpsi": c["wpsi"], "g12": c["g12"], "g1psi": c["g1psi"],
            "m_diag": float(m_run[n]), "h_phi": float(h_n),
            "rhs_thm": rhs["thm"], "rhs_proof_k2": rhs["proof_k2"],
            "rhs_proof_k32": rhs["proof_k32"],
            "ratio_h_over_g": r_g, "ratio_h_over_rhs": r_r,
            "cell_flag": ";".join(sorted({flag_g, flag_r} - {""})),
        })
    first_h, first_r = rows[0]["h_phi"], rows[0]["rhs_thm"]
    for row in rows:
        row["decay_flag"] = int(_decayed(row["h_phi"], first_h, tol)
                                and _decayed(row["rhs_thm"], first_r, tol))
    return rows


def _failed_rows(pid, fid, x, label, n_grid, exc):
    rows = []
    for n in n_grid:
        row = {c: math.nan for c in ROW_COLUMNS}
        row.update(schema_version=SCHEMA_VERSION, pair_id=pid, fn_id=fid, x=x, label=label,
                   n=n, delta=math.pi / (n + 1), decay_flag=0,
                   cell_flag=f"error:{type(exc).__name__}")
        rows.append(row)
    return rows


def worker_count():
    try:
        cap = int(os.environ.get("OSS_THREADS", "0"))
    except ValueError:
        cap = 0
    cpus = os.cpu_count() or 1
    return max(1, min(cap, cpus) if cap > 0 else cpus)


@dataclass
class SweepReport:
    rows: list
    summary: list
    tolerances: Tolerances

    @property
    def all_pass(self):
        return all(v != "fail" for s in self.summary
                   for v in (s["corollary1_decay"], s["domination_bounded"], s["negative_control"]))


def run_sweep(cfg):
    """Deterministic sweep; rows sorted by (pair, fn, x, n)."""
    cfg.validate()
    tol = cfg.tolerances
    n_grid = list(cfg.n_grid)
    cells = cfg.cells()
    pairs = {pid: nf.get_pair(pid) for pid in cfg.pair_ids}

    def job(cell):
        pid, fid, x, label = cell
        try:
            return compute_cell(pairs[pid], get_function(fid), x, label, n_grid, tol)
        except Exception as exc:  # noqa: BLE001 - a failing cell is reported, not fatal
            log.exception("cell %s/%s/x=%r failed", pid, fid, x)
            return _failed_rows(pid, fid, x, label, n_grid, exc)

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        results = list(pool.map(job, cells))
    rows = [r for block in results for r in block]
    return SweepReport(rows, summarize(rows, tol), tol)


# -- verdicts ----------------------------------------------------------------

def _decayed(value, first, tol):
    return value <= tol.zero_floor or value < tol.decay_factor * first


def decay_verdict(values, tol):
    """Tail-max criterion: max of the last ``tail_points`` values is below
    decay_factor times the first one (numerical zeros always pass)."""
    first = values[0]
    tail = max(values[-tol.tail_points:])
    ok = tail <= tol.zero_floor or tail < tol.decay_factor * first
    return ok, first, tail


def domination_verdict(ns, h, rhs, tol):
    """h/rhs over n >= dom_n_min: finite with max/min below dom_spread_max.
    Rows with h numerically zero are trivially dominated and skipped."""
    ratios = []
    for n, hv, rv in zip(ns, h, rhs):
        if n < tol.dom_n_min or hv <= tol.zero_floor:
            continue
        if rv <= tol.zero_floor or not math.isfinite(hv / rv):
            return False, math.inf, math.inf, math.inf
        ratios.append(hv / rv)
    if not ratios:
        return True, 0.0, 0.0, 1.0
    hi, lo = max(ratios), min(ratios)
    spread = hi / lo
    return spread < tol.dom_spread_max, hi, lo, spread


def summarize(rows, tol):
    groups = {}
    for r in rows:
        groups.setdefault((r["pair_id"], r["fn_id"], float(r["x"]), r["label"]), []).append(r)
    out = []
    for (pid, fid, x, label), grp in sorted(groups.items(), key=lambda kv: kv[0][:3]):
        grp = sorted(grp, key=lambda r: int(r["n"]))
        ns = [int(r["n"]) for r in grp]
        h = [float(r["h_phi"]) for r in grp]
        rhs = [float(r["rhs_thm"]) for r in grp]
        broken = any(str(r["cell_flag"]).startswith("error") for r in grp)
        s = {c: "" for c in SUMMARY_COLUMNS}
        s.update(schema_version=SCHEMA_VERSION, pair_id=pid, fn_id=fid, x=x, label=label,
                 decay_factor=tol.decay_factor, negative_factor=tol.negative_factor,
                 dom_spread_max=tol.dom_spread_max, dom_n_min=tol.dom_n_min,
                 zero_floor=tol.zero_floor)
        ok_h, s["h_first"], s["h_tail_max"] = decay_verdict(h, tol)
        ok_r, s["rhs_first"], s["rhs_tail_max"] = decay_verdict(rhs, tol)
        ok_d, s["dom_max"], s["dom_min"], s["dom_spread"] = domination_verdict(ns, h, rhs, tol)
        if label == Label.LPSI.value:
            s["corollary1_decay"] = "pass" if ok_h and ok_r and not broken else "fail"
            s["domination_bounded"] = "pass" if ok_d and not broken else "fail"
            s["negative_control"] = "n/a"
        elif label == Label.NON_LPSI.value:
            s["corollary1_decay"] = "n/a"
            s["domination_bounded"] = "n/a"
            held = all(v >= tol.negative_factor * h[0] for v in h) and not broken
            s["negative_control"] = "pass" if held else "fail"
        else:
            s["corollary1_decay"] = s["domination_bounded"] = s["negative_control"] = "n/a"
        out.append(s)
    return out


# -- CSV ---------------------------------------------------------------------

def _fmt(col, value):
    if col in _FLOAT_COLUMNS or isinstance(value, float):
        return format(float(value), ".17g")
    return str(value)


def _write(path, columns, records):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for rec in records:
            w.writerow([_fmt(c, rec[c]) for c in columns])


def summary_path(path):
    p = Path(path)
    return p.with_name(p.stem + ".summary.csv") if p.suffix == ".csv" else Path(str(p) + ".summary.csv")


def emit_csv(report, path):
    """Rows to ``path`` and verdicts to ``<stem>.summary.csv`` next to it."""
    path = Path(path)
    try:
        if path.parent and not path.parent.exists():
            path.parent.mkdir(parents=True)
        _write(path, ROW_COLUMNS, report.rows)
        _write(summary_path(path), SUMMARY_COLUMNS, report.summary)
    except OSError as exc:
        raise OSError(f"writing report to {path}: {exc}") from exc
    return path, summary_path(path)


def read_rows(path):
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    if rows and set(rows[0]) != set(ROW_COLUMNS):
        raise ConfigError(f"{path}: header does not match schema version {SCHEMA_VERSION}")
    return rows


def read_tolerances(path):
    """Thresholds recorded in the summary file next to ``path`` (defaults if absent)."""
    sp = summary_path(path)
    if not sp.exists():
        return Tolerances()
    with open(sp, encoding="utf-8", newline="") as fh:
        first = next(csv.DictReader(fh), None)
    if first is None:
        return Tolerances()
    return Tolerances(decay_factor=float(first["decay_factor"]),
                      negative_factor=float(first["negative_factor"]),
                      dom_spread_max=float(first["dom_spread_max"]),
                      dom_n_min=int(first["dom_n_min"]),
                      zero_floor=float(first["zero_floor"]))


# -- pair check --------------------------------------------------------------

YOUNG_GRID = np.r_[0.0, 2.0 ** np.arange(-10, 5)]


def pair_check(pair_id):
    """Condition flags plus Young, conjugate-oracle and Lemma-1 diagnostics."""
    pair = nf.get_pair(pair_id)
    report = nf.check_conditions(pair)
    d = report.diagnostics
    u, v = np.meshgrid(YOUNG_GRID, YOUNG_GRID)
    d["young_worst_gap"] = float(np.min(nf.young_gap(pair, u, v)))
    uu = YOUNG_GRID
    pu = pair.phi.derivative(uu)
    gap = nf.young_gap(pair, uu, pu)
    d["young_equality_rel_gap"] = float(np.max(np.abs(gap) / np.maximum(1.0, uu * pu)))
    vv = np.geomspace(2.0 ** -8, 2.0 ** 6, 64)
    u_max = 8.0
    while float(pair.phi.derivative(u_max)) <= vv[-1]:
        u_max *= 2
    conj = nf.legendre_conjugate(pair.phi, vv, u_max)
    d["conjugate_max_rel_err"] = float(np.max(np.abs(conj - pair.psi(vv)) / pair.psi(vv)))
    us = 2.0 ** np.arange(-10, 1)
    if pair.psi.kind is nf.Kind.FROM_DERIVATIVE:
        ns = 2 ** np.arange(0, 13) - 1
    else:
        ns = np.arange(4096)
    d["lemma1_C"] = float(np.max(nf.lemma1_ratio(pair, us[:, None], ns[None, :])))
    return report
