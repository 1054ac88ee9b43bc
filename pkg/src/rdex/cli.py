"""Command-line driver.

Subcommands
-----------
theory     parameter card (JSON + lambda_k CSV) for a parameter tuple
exact      exact small-system audit (stationary state, entropy flow,
           functional inequalities)
simulate   run replicas from a config file; emits an observables CSV, a JSON
           manifest, and optional binary snapshots
run        named batch experiment: theory-card, exact-audit, hydro,
           hydrostatics-scaling, clt-spectrum, localeq-sweep, flow-audit,
           spde-audit

All experiments exit nonzero when an assertion gate fails.  Config files are
flat ``key = value`` text (see docs/csv-schemas.md and docs/config examples
under demos/).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .experiments import EXPERIMENTS, run_experiment
from .io import ManifestWriter, load_config, resolve_config
from .lattice import ParticleConfig, save_snapshot
from .simulate import SimConfig, run
from .theory import ModelParams

SIMULATE_SCHEMA = {
    "a": (1.0, "creation base rate"),
    "b": (1.0, "annihilation rate"),
    "lam": (0.2, "interaction strength"),
    "d": (1, "dimension"),
    "n": (64, "torus side length"),
    "total_time": (100.0, "model time per replica"),
    "sample_interval": (0.1, "sampling cadence"),
    "burn_in": (-1.0, "discarded prefix; -1 = 10 macroscopic relaxation times"),
    "replicas": (1, "independent replicas"),
    "kmax": (0, "record Fourier modes up to this cutoff"),
    "box_radius": (-1, "record box pattern histograms; -1 = off"),
    "snapshots": (False, "write a final binary snapshot per replica"),
}


def _cmd_simulate(args) -> int:
    cfg = resolve_config(load_config(args.config), SIMULATE_SCHEMA, "simulate")
    seed = args.seed if args.seed is not None else 0
    man = ManifestWriter("simulate", args.out_dir, cfg, seed)
    p = ModelParams(cfg["a"], cfg["b"], cfg["lam"], cfg["d"], cfg["n"])
    sim = SimConfig(
        params=p,
        seed=seed,
        total_time=cfg["total_time"],
        sample_interval=cfg["sample_interval"],
        burn_in=None if cfg["burn_in"] < 0 else cfg["burn_in"],
        replicas=cfg["replicas"],
        kmax=cfg["kmax"],
        box_radius=None if cfg["box_radius"] < 0 else cfg["box_radius"],
        record_configs=cfg["snapshots"],
        threads=args.threads,
    )
    streams = run(sim)
    man.telemetry["events"] = sum(s.events for s in streams)
    header = ["replica", "t", "mean_density"]
    m = len(streams[0].kvecs)
    for k in streams[0].kvecs:
        tag = "_".join(str(int(c)) for c in k)
        header += [f"re_k{tag}", f"im_k{tag}"]
    rows = []
    for s in streams:
        for j, t in enumerate(s.times):
            row = [s.replica, float(t), float(s.mean_density[j])]
            for q in range(m):
                row += [float(s.modes[j, q].real), float(s.modes[j, q].imag)]
            rows.append(tuple(row))
    man.write_csv("observables.csv", header, rows)
    if cfg["snapshots"]:
        for s in streams:
            cfgp = ParticleConfig(p.n, p.d, s.configs[-1])
            path = man.path(f"final_replica{s.replica}.snap")
            save_snapshot(cfgp, path, time=float(s.times[-1]))
            man.register(path)
    man.finalize(True, {"replicas": len(streams)})
    print(f"simulate: wrote {man.out_dir}/observables.csv")
    return 0


def _cmd_run(args) -> int:
    cfg = load_config(args.config) if args.config else {}
    res = run_experiment(
        args.experiment, cfg, args.out_dir, seed=args.seed or 0, threads=args.threads
    )
    status = "PASS" if res.passed else "FAIL"
    print(f"{res.name}: {status}")
    for key, val in res.summary.items():
        print(f"  {key}: {val}")
    return 0 if res.passed else 1


def _cmd_theory(args) -> int:
    cfg = {
        "a": args.a, "b": args.b, "lam": args.lam, "d": args.d, "n": args.n,
        "kmax": args.kmax,
    }
    res = run_experiment("theory-card", cfg, args.out_dir, seed=args.seed or 0)
    for key in ("rho_star", "chi", "eps0", "F_prime", "kappa"):
        print(f"{key} = {res.summary[key]}")
    return 0


def _cmd_exact(args) -> int:
    cfg = {"a": args.a, "b": args.b, "lam": args.lam, "n": args.n}
    res = run_experiment("exact-audit", cfg, args.out_dir, seed=args.seed or 0)
    status = "PASS" if res.passed else "FAIL"
    print(f"exact-audit: {status}")
    for key, val in res.summary.items():
        print(f"  {key}: {val}")
    return 0 if res.passed else 1


def main(argv=None) -> int:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="base RNG seed")
    common.add_argument("--out-dir", type=Path, default=Path("out"))
    common.add_argument("--threads", type=int, default=2)

    parser = argparse.ArgumentParser(prog="rdex", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    th = sub.add_parser("theory", parents=[common], help="print/write the parameter card")
    th.add_argument("--a", type=float, default=1.0)
    th.add_argument("--b", type=float, default=1.0)
    th.add_argument("--lam", type=float, default=0.2)
    th.add_argument("--d", type=int, default=1)
    th.add_argument("--n", type=int, default=256)
    th.add_argument("--kmax", type=int, default=16)
    th.set_defaults(fn=_cmd_theory)

    ex = sub.add_parser("exact", parents=[common], help="exact small-system audit")
    ex.add_argument("--a", type=float, default=1.0)
    ex.add_argument("--b", type=float, default=1.0)
    ex.add_argument("--lam", type=float, default=0.3)
    ex.add_argument("--n", type=int, default=3)
    ex.set_defaults(fn=_cmd_exact)

    si = sub.add_parser("simulate", parents=[common], help="run replicas from a config file")
    si.add_argument("--config", type=Path, required=True)
    si.set_defaults(fn=_cmd_simulate)

    ru = sub.add_parser("run", parents=[common], help="run a named experiment")
    ru.add_argument("experiment", choices=sorted(EXPERIMENTS))
    ru.add_argument("--config", type=Path, default=None)
    ru.set_defaults(fn=_cmd_run)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
