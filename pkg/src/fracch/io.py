"""Configuration parsing and on-disk formats.

Config files are flat ``key = value`` lines with ``#`` comments. Snapshots
are text: four header lines ``N=``, ``L=``, ``a=``, ``t=`` followed by one
sample per line in 17 significant digits, which makes the round trip exact.
"""
from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .diagnostics import COLUMNS, DiagnosticRow
from .dynamics import BlowUpEvent, RunReport, SimConfig, StepState
from .grid import Field, PeriodicGrid
from .littlewood_paley import BesovParams
from .picard import PicardConfig
from .trajectory import Trajectory

OUTPUT_ENV = "FRACCH_OUTPUT"


class ConfigError(ValueError):
    def __init__(self, msg, line=None, key=None):
        self.line = line
        self.key = key
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        super().__init__(f"{', '.join(where)}: {msg}" if where else msg)


def _bool(s):
    t = s.lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {s!r}")


def _opt_float(s):
    return None if s.lower() in ("none", "") else float(s)


def _float(s):
    v = float(s)
    if math.isnan(v):
        raise ValueError("nan is not allowed")
    return v


def _int(s):
    return int(s)


# key -> (parser, default, help)
COMMON_KEYS = {
    "a": (_float, 1.5, "order of the inertia operator"),
    "L": (_float, 40.0, "period length"),
    "N": (_int, 512, "number of grid points (power of two)"),
    "preset": (str, None, "initial-data generator (see `fracch preset --list`)"),
    "init": (str, None, "snapshot file with the initial field"),
    "seed": (_int, 0, "seed for random perturbations and fields"),
}

SIM_KEYS = {
    **COMMON_KEYS,
    "T": (_float, 5.0, "time horizon"),
    "courant": (_float, 0.5, "Courant number for adaptive steps"),
    "dt": (_opt_float, None, "fixed step; 'none' for adaptive"),
    "dealias": (_bool, True, "2/3-rule truncation of products"),
    "blowup_threshold": (_float, 1e3, "||u_x||_inf level that ends a run"),
    "strip_min": (_float, 0.0, "analyticity-strip trigger in grid cells; 0 disables"),
    "snapshot_every": (_opt_float, None, "snapshot interval; 'none' for start/end only"),
    "diagnostics_every": (_float, 0.1, "diagnostics interval"),
}

PICARD_KEYS = {
    **COMMON_KEYS,
    "T": (_float, 1.0, "horizon of each linear solve"),
    "dt": (_float, 0.02, "fixed RK4 step of each linear solve"),
    "n_max": (_int, 16, "maximum number of iterates"),
    "tol": (_float, 1e-11, "stop once successive differences drop below this"),
    "rho": (_float, 0.7, "ratio bound for geometric contraction"),
    "besov_s": (_float, 1.5, "regularity of the convergence norm"),
    "besov_p": (_float, 2.0, "integrability of the convergence norm"),
    "besov_r": (_float, 1.0, "summation exponent of the convergence norm"),
}

KEYSETS = {"sim": SIM_KEYS, "picard": PICARD_KEYS}


@dataclass
class ParsedConfig:
    kind: str
    values: dict
    explicit: frozenset = frozenset()  # keys set in the file

    @property
    def grid(self) -> PeriodicGrid:
        return PeriodicGrid(self.values["N"], self.values["L"])

    @property
    def preset(self):
        return self.values.get("preset")

    @property
    def seed(self) -> int:
        return self.values["seed"]

    def sim_config(self, **extra) -> SimConfig:
        v = self.values
        keys = {f.name for f in fields(SimConfig)}
        kw = {k: v[k] for k in keys if k in v and v[k] is not None}
        kw.update(extra)
        return SimConfig(**kw)

    def picard_config(self) -> PicardConfig:
        v = self.values
        return PicardConfig(a=v["a"], T=v["T"], n_max=v["n_max"], dt=v["dt"], tol=v["tol"],
                            rho=v["rho"],
                            besov=BesovParams(v["besov_s"], v["besov_p"], v["besov_r"]))


def defaults(kind: str = "sim") -> dict:
    return {k: d for k, (_, d, _) in KEYSETS[kind].items()}


def describe_keys(kind: str = "sim") -> str:
    rows = [f"  {k:<18} default {d!s:<8} {h}" for k, (_, d, h) in KEYSETS[kind].items()]
    return "config keys:\n" + "\n".join(rows)


def parse_config(text: str, kind: str = "sim", required=()) -> ParsedConfig:
    """Parse flat ``key = value`` text; unknown keys and bad values name their line."""
    if kind not in KEYSETS:
        raise ValueError(f"unknown config kind {kind!r}")
    spec = KEYSETS[kind]
    values = defaults(kind)
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected key = value", line=lineno)
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in spec:
            raise ConfigError(f"unknown key (allowed: {', '.join(spec)})", line=lineno, key=key)
        if key in seen:
            raise ConfigError(f"duplicate key, first set on line {seen[key]}", line=lineno, key=key)
        try:
            values[key] = spec[key][0](val)
        except ValueError as err:
            raise ConfigError(f"bad value {val!r}: {err}", line=lineno, key=key) from None
        seen[key] = lineno
    for key in required:
        if values.get(key) is None:
            raise ConfigError("missing mandatory key", key=key)
    try:
        cfg = ParsedConfig(kind, values, frozenset(seen))
        cfg.grid
        cfg.sim_config() if kind == "sim" else cfg.picard_config()
    except ValueError as err:
        raise ConfigError(str(err)) from None
    return cfg


def load_config(path, kind="sim", required=()) -> ParsedConfig:
    return parse_config(Path(path).read_text(), kind, required)


# snapshots --------------------------------------------------------------------

def save_snapshot(f: Field, path, a: float = float("nan"), t: float = 0.0):
    g = f.grid
    lines = [f"N={g.N}", f"L={g.L:.17g}", f"a={a:.17g}", f"t={t:.17g}"]
    lines += [f"{v:.17g}" for v in f.values]
    Path(path).write_text("\n".join(lines) + "\n")


@dataclass
class Snapshot:
    field: Field
    a: float
    t: float


def read_snapshot(path) -> Snapshot:
    lines = Path(path).read_text().splitlines()
    head = {}
    for i, name in enumerate(("N", "L", "a", "t")):
        if i >= len(lines) or not lines[i].startswith(name + "="):
            found = lines[i] if i < len(lines) else "end of file"
            raise ValueError(f"{path}: header line {i + 1} should be '{name}=...', found {found!r}")
        try:
            head[name] = (int if name == "N" else float)(lines[i][len(name) + 1:])
        except ValueError:
            raise ValueError(f"{path}: malformed header line {i + 1}: {lines[i]!r}") from None
    body = [s for s in lines[4:] if s.strip()]
    if len(body) != head["N"]:
        raise ValueError(f"{path}: header declares N={head['N']} samples, found {len(body)}")
    grid = PeriodicGrid(head["N"], head["L"])
    return Snapshot(Field(grid, np.array([float(s) for s in body])), head["a"], head["t"])


def load_snapshot(path) -> Field:
    return read_snapshot(path).field


# run reports ------------------------------------------------------------------

def _fmt(v):
    return "" if v is None else f"{v:.17g}"


def write_diagnostics(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in rows:
            w.writerow([_fmt(getattr(r, c)) for c in COLUMNS])


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) if isinstance(v, float) else v for v in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, BesovParams):
        return asdict(obj)
    return obj


def write_json(obj, path):
    Path(path).write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


def config_echo(config) -> dict:
    return _jsonable(asdict(config))


def save_trajectory(traj: Trajectory, path):
    np.savez(path, times=traj.times, values=traj.values,
             derivs=traj.derivs if traj.derivs is not None else np.zeros(0))


def load_trajectory(path) -> Trajectory:
    with np.load(path) as z:
        d = z["derivs"]
        return Trajectory(z["times"], z["values"], d if d.size else None)


def write_run(report: RunReport, outdir, extra: dict | None = None) -> dict:
    """Write ``diagnostics.csv``, snapshots, the trajectory and ``report.json``."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    a = report.config.a
    files = {"diagnostics": "diagnostics.csv"}
    write_diagnostics(report.rows, out / files["diagnostics"])
    save_snapshot(report.m0, out / "m0.txt", a=a, t=0.0)
    files["m0"] = "m0.txt"
    snaps = []
    for i, s in enumerate(report.snapshots):
        name = f"snapshot_{i:04d}.txt"
        save_snapshot(s.m, out / name, a=a, t=s.t)
        snaps.append(name)
    if report.final is not None:
        save_snapshot(report.final.m, out / "final.txt", a=a, t=report.final.t)
        files["final"] = "final.txt"
    if report.trajectory is not None:
        save_trajectory(report.trajectory, out / "trajectory.npz")
        files["trajectory"] = "trajectory.npz"
    files["snapshots"] = snaps
    doc = {
        "config": config_echo(report.config),
        "grid": {"N": report.grid.N, "L": report.grid.L},
        "steps": report.steps,
        "events": [e.as_dict() for e in report.events],
        "files": files,
    }
    doc.update(extra or {})
    write_json(doc, out / "report.json")
    return doc


def read_run(outdir):
    """Return ``(report_json, m0, trajectory_or_None)`` from a run directory."""
    out = Path(outdir)
    path = out / "report.json"
    if not path.exists():
        raise FileNotFoundError(f"{out} is not a run directory (no report.json)")
    doc = json.loads(path.read_text())
    m0 = load_snapshot(out / doc["files"]["m0"])
    traj = None
    if "trajectory" in doc["files"]:
        traj = load_trajectory(out / doc["files"]["trajectory"])
    return doc, m0, traj


def output_root(default="fracch_out") -> Path:
    return Path(os.environ.get(OUTPUT_ENV, default))


def read_diagnostics(path) -> list:
    with open(path, newline="") as fh:
        rd = csv.DictReader(fh)
        return [DiagnosticRow(**{c: (float(r[c]) if r[c] != "" else None) for c in COLUMNS})
                for r in rd]


def sim_config_from_echo(echo: dict) -> SimConfig:
    kw = dict(echo)
    if kw.get("besov") is not None:
        kw["besov"] = BesovParams(**{k: float(v) for k, v in kw["besov"].items()})
    return SimConfig(**kw)


def load_run(outdir) -> RunReport:
    """Rebuild a :class:`RunReport` from a directory written by :func:`write_run`."""
    doc, m0, traj = read_run(outdir)
    out = Path(outdir)
    rep = RunReport(config=sim_config_from_echo(doc["config"]), m0=m0)
    rep.rows = read_diagnostics(out / doc["files"]["diagnostics"])
    rep.events = [BlowUpEvent(**e) for e in doc["events"]]
    rep.steps = doc["steps"]
    if "final" in doc["files"]:
        snap = read_snapshot(out / doc["files"]["final"])
        rep.final = StepState(snap.t, snap.field)
    rep.trajectory = traj
    return rep
