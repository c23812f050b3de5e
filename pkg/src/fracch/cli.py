"""Command-line entry point: ``fracch <subcommand>`` or ``python -m fracch``.

Exit codes: 0 success, 2 audit failure, 3 run ended by an unexpected
blow-up event, 1 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields, replace
from pathlib import Path

import numpy as np

from . import io
from .audit import (audit_energy, audit_int, audit_l1, audit_ux_bound,
                    continuous_dependence_probe)
from .characteristics import flow_map, lagrangian_defects, velocity_trajectory
from .dynamics import SimConfig, simulate
from .grid import PeriodicGrid, helmholtz_invert
from .kernel import green_kernel, green_kernel_dx
from .littlewood_paley import BesovParams, besov_norm, block_norms
from .picard import PicardConfig, cross_check, iterate
from .presets import PRESETS, get_preset, picard_table, run_preset, symmetric_labels

EXIT_OK, EXIT_ERROR, EXIT_AUDIT, EXIT_BLOWUP = 0, 1, 2, 3
EXPECTS_BLOWUP = {"breaking_a1"}

log = logging.getLogger("fracch")


class UsageError(Exception):
    pass


def _outdir(args, name):
    if args.out:
        return Path(args.out)
    return io.output_root() / name


def _emit(obj):
    print(json.dumps(io._jsonable(obj), indent=2, sort_keys=True))


# config resolution ------------------------------------------------------------

def resolve_sim(parsed: io.ParsedConfig):
    """Grid, SimConfig and initial momentum from a parsed config.

    A preset supplies the initial data and the defaults; keys written in the
    file override them.
    """
    v = parsed.values
    if parsed.preset:
        p = get_preset(parsed.preset)
        if p.kind != "sim":
            raise UsageError(f"preset {p.name!r} is an iteration preset; use `picard`")
        base = p.config
        N = v["N"] if "N" in parsed.explicit else p.grid.N
        L = v["L"] if "L" in parsed.explicit else p.grid.L
        grid = PeriodicGrid(N, L)
        m0 = replace(p, grid=grid).initial()
    elif v.get("init"):
        m0 = io.load_snapshot(v["init"])
        grid = m0.grid
        base = SimConfig()
    else:
        raise io.ConfigError("missing mandatory key (give preset or init)", key="preset")
    names = {f.name for f in fields(SimConfig)}
    over = {k: v[k] for k in parsed.explicit if k in names}
    return grid, replace(base, record_trajectory=True, **over), m0


def resolve_picard(parsed: io.ParsedConfig):
    v = parsed.values
    if parsed.preset:
        p = get_preset(parsed.preset)
        if p.kind != "picard":
            raise UsageError(f"preset {p.name!r} is a simulation preset; use `run`")
        N = v["N"] if "N" in parsed.explicit else p.grid.N
        L = v["L"] if "L" in parsed.explicit else p.grid.L
        u0 = replace(p, grid=PeriodicGrid(N, L)).initial()
        base = p.config
    elif v.get("init"):
        u0 = io.load_snapshot(v["init"])
        base = PicardConfig()
    else:
        raise io.ConfigError("missing mandatory key (give preset or init)", key="preset")
    over = {k: v[k] for k in parsed.explicit if k in ("a", "T", "n_max", "dt", "tol", "rho")}
    if parsed.explicit & {"besov_s", "besov_p", "besov_r"}:
        over["besov"] = BesovParams(v["besov_s"], v["besov_p"], v["besov_r"])
    return u0, replace(base, **over)


# subcommands ------------------------------------------------------------------

def cmd_run(args):
    parsed = io.load_config(args.config, "sim")
    grid, cfg, m0 = resolve_sim(parsed)
    report = simulate(m0, cfg)
    out = _outdir(args, Path(args.config).stem)
    doc = io.write_run(report, out, {"source_config": parsed.values, "seed": parsed.seed})
    print(f"wrote {out}")
    if report.blew_up:
        ev = report.events[0]
        print(f"blow-up event at t={ev.t:.6g} x={ev.x:.6g} ({ev.reason})")
        if parsed.preset not in EXPECTS_BLOWUP:
            return EXIT_BLOWUP
    return EXIT_OK


def cmd_picard(args):
    parsed = io.load_config(args.config, "picard")
    u0, cfg = resolve_picard(parsed)
    result = iterate(u0, cfg)
    gap = cross_check(u0, cfg, result)
    out = _outdir(args, Path(args.config).stem)
    out.mkdir(parents=True, exist_ok=True)
    rows = picard_table(result)
    io.write_csv(out / "picard.csv", ("n", "d_n", "ratio", "sup_norm"),
                 [(n, float(d), float(r), float(s)) for n, d, r, s in rows])
    io.write_json({"config": io.config_echo(cfg), "gap": gap,
                   "tail_ratios": result.tail_ratios().tolist(),
                   "geometric": result.geometric, "converged": result.converged},
                  out / "picard.json")
    print("n,d_n,ratio,sup_norm")
    for n, d, r, s in rows:
        print(f"{n},{d:.6e},{r:.4f},{s:.6e}")
    print(f"cross-method gap (sup norm at T={cfg.T}): {gap:.3e}")
    return EXIT_OK if result.geometric else EXIT_AUDIT


def cmd_characteristics(args):
    report = io.load_run(args.run)
    if report.trajectory is None:
        raise UsageError(f"{args.run} has no stored trajectory")
    g = report.grid
    traj = report.trajectory
    vel = traj if args.advect == "m" else velocity_trajectory(traj, g, report.config.a)
    flow = flow_map(vel, symmetric_labels(g), g)
    defects = lagrangian_defects(flow, traj, report.m0)
    path = Path(args.out) if args.out else Path(args.run) / f"characteristics_{args.advect}.csv"
    nt, nl = flow.q.shape
    io.write_csv(path, ("t", "xi", "q", "q_xi", "defect"),
                 ((float(flow.times[i]), float(flow.labels[j]), float(flow.q[i, j]),
                   float(flow.q_xi[i, j]), float(defects[i, j]))
                  for i in range(nt) for j in range(nl)))
    print(f"wrote {path}; max defect {defects.max():.3e}; events {flow.events}")
    return EXIT_OK


def _parse_probe(spec):
    out = {"eps": 1e-4, "trials": 3, "seed": 0, "T": 1.0}
    for item in spec or []:
        if "=" not in item:
            raise UsageError(f"probe option {item!r} is not key=value")
        k, val = item.split("=", 1)
        if k not in out:
            raise UsageError(f"unknown probe option {k!r} (allowed: {', '.join(out)})")
        out[k] = type(out[k])(float(val)) if k in ("trials", "seed") else float(val)
    return out


def cmd_audit(args):
    report = io.load_run(args.run)
    verdicts = [audit_int(report), audit_l1(report), audit_energy(report)]
    if report.config.a > 1:
        verdicts.append(audit_ux_bound(report))
    doc = {"run": str(args.run), "verdicts": [v.as_dict() for v in verdicts]}
    ok = all(v.passed for v in verdicts)
    if args.probe is not None:
        opts = _parse_probe(args.probe)
        u0 = helmholtz_invert(report.m0, report.config.a)
        cfg = replace(report.config, T=opts["T"], record_trajectory=False)
        probe = continuous_dependence_probe(u0, opts["eps"], cfg, int(opts["trials"]),
                                            int(opts["seed"]))
        doc["probe"] = probe
        ok = ok and probe["passed"]
    doc["passed"] = ok
    io.write_json(doc, Path(args.run) / "audit.json")
    _emit(doc)
    return EXIT_OK if ok else EXIT_AUDIT


def cmd_besov(args):
    f = io.load_snapshot(args.snapshot)
    params = BesovParams(args.s, args.p, args.r)
    j, w = block_norms(f, params)
    print("j,weighted_block_norm")
    for a, b in zip(j, w):
        print(f"{a},{b:.12e}")
    print(f"norm,{besov_norm(f, params):.12e}")
    return EXIT_OK


def cmd_kernel_table(args):
    x = np.linspace(0.0, args.xmax, args.n)
    lines = ["a,x,G,dG"]
    for a in args.a:
        G = green_kernel(a, x, L=args.L)
        dG = green_kernel_dx(a, x, L=args.L) + 0.0
        lines += [f"{a:.17g},{xi:.17g},{g:.17g},{d:.17g}" for xi, g, d in zip(x, G, dG)]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _sweep_one(job):
    text, outdir = job
    parsed = io.parse_config(text, "sim")
    grid, cfg, m0 = resolve_sim(parsed)
    report = simulate(m0, cfg)
    io.write_run(report, outdir, {"source_config": parsed.values})
    return str(outdir), report.blew_up


def cmd_sweep(args):
    base = Path(args.config).read_text()
    key, _, values = args.param.partition("=")
    if not values:
        raise UsageError("--param must look like key=v1,v2,...")
    root = _outdir(args, Path(args.config).stem + "_sweep")
    jobs = []
    for val in values.split(","):
        lines = [ln for ln in base.splitlines()
                 if ln.split("#", 1)[0].split("=", 1)[0].strip() != key]
        jobs.append(("\n".join(lines + [f"{key}={val}"]), root / f"{key}={val}"))
    io.parse_config(jobs[0][0], "sim")
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as ex:
            results = list(ex.map(_sweep_one, jobs))
    else:
        results = [_sweep_one(j) for j in jobs]
    for out, blew in results:
        print(f"{out}: {'blow-up' if blew else 'completed'}")
    return EXIT_OK


def cmd_preset(args):
    if args.list or not args.name:
        for name, p in PRESETS.items():
            print(f"{name:<16} {p.description}")
        return EXIT_OK
    out = _outdir(args, args.name)
    res = run_preset(args.name, out)
    for v in res.verdicts:
        print(f"{'PASS' if v.passed else 'FAIL'}  {v.name:<22} measured {v.measured:.6g}"
              f"  tolerance {v.tolerance:.6g}")
    print(f"wrote {out} ({res.seconds:.1f}s)")
    return EXIT_OK if res.passed else EXIT_AUDIT


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fracch",
        description="Spectral laboratory for the fractional Camassa-Holm equation.",
        epilog=f"Outputs go under ${io.OUTPUT_ENV} (default ./fracch_out) unless --out is given.",
        formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("run", help="simulate the momentum equation",
                       description=io.describe_keys("sim"),
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("picard", help="iterated transport construction",
                       description=io.describe_keys("picard"),
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_picard)

    p = sub.add_parser("characteristics", help="flow map of a stored run")
    p.add_argument("--run", required=True)
    p.add_argument("--advect", choices=("u", "m"), default="u",
                   help="transport field of the characteristics (default u)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_characteristics)

    p = sub.add_parser("audit", help="conservation and bound audits of a stored run")
    p.add_argument("--run", required=True)
    p.add_argument("--probe", nargs="*", metavar="KEY=VALUE",
                   help="continuous-dependence probe: eps=, trials=, seed=, T=")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("besov", help="dyadic block table of a snapshot")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--s", type=float, default=1.5)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--r", type=float, default=1.0)
    p.set_defaults(func=cmd_besov)

    p = sub.add_parser("kernel-table", help="CSV of the convolution kernel and its derivative")
    p.add_argument("--a", type=float, action="append", required=True)
    p.add_argument("--xmax", type=float, default=10.0)
    p.add_argument("--n", type=int, default=201)
    p.add_argument("--L", type=float, default=40.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_kernel_table)

    p = sub.add_parser("sweep", help="independent runs over one config key")
    p.add_argument("--config", required=True)
    p.add_argument("--param", required=True, help="key=v1,v2,...")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("preset", help="run a named experiment with its checks")
    p.add_argument("name", nargs="?")
    p.add_argument("--list", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_preset)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, io.ConfigError, KeyError, FileNotFoundError, ValueError) as err:
        msg = err.args[0] if isinstance(err, KeyError) and err.args else err
        print(f"fracch: error: {msg}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
