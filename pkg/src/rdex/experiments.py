"""Batch experiment pipelines behind the command-line driver.

Each experiment takes a flat config dict (validated against its schema,
defaults echoed into the manifest), writes CSV/JSON artifacts into the
output directory, and returns an ExperimentResult whose ``passed`` reflects
its assertion gates.  CSV schemas are documented in docs/csv-schemas.md.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import exact, fields, flows, localeq, pde, spde
from .io import ManifestWriter, resolve_config
from .simulate import SimConfig, run
from .theory import (
    F_prime,
    G,
    ModelParams,
    chi,
    g_d,
    kappa,
    lambda_c_diagnostic,
    lambda_of_ksq,
    rho_star,
)


@dataclass
class ExperimentResult:
    name: str
    passed: bool
    summary: dict
    manifest_path: object


_PARAM_KEYS = {
    "a": (1.0, "creation base rate"),
    "b": (1.0, "annihilation rate"),
    "lam": (0.2, "interaction strength"),
    "d": (1, "dimension"),
    "n": (256, "torus side length"),
}


def _params_from(cfg: dict) -> ModelParams:
    return ModelParams(cfg["a"], cfg["b"], cfg["lam"], cfg["d"], cfg["n"])


def _as_list(v):
    return list(v) if isinstance(v, (list, tuple)) else [v]


# ---------------------------------------------------------------------------
# theory-card

THEORY_CARD_SCHEMA = {
    **_PARAM_KEYS,
    "kmax": (16, "largest mode in the lambda_k table"),
    "c_const": (1.0, "constant for the smallness diagnostic"),
}


def theory_card(cfg: dict, out_dir, seed: int = 0, threads: int = 1) -> ExperimentResult:
    cfg = resolve_config(cfg, THEORY_CARD_SCHEMA, "theory-card")
    man = ManifestWriter("theory-card", out_dir, cfg, seed)
    p = _params_from(cfg)
    rs = rho_star(p)
    card = {
        "a": p.a,
        "b": p.b,
        "lam": p.lam,
        "d": p.d,
        "n": p.n,
        "eps0": p.eps0,
        "c_max": p.c_max,
        "rho_star": rs,
        "chi": chi(rs),
        "F_prime": F_prime(rs, p),
        "G": G(rs, p),
        "kappa": kappa(rs, p),
        "smallness": lambda_c_diagnostic(p, cfg["c_const"]),
    }
    man.write_json("theory_card.json", card)
    ks = np.arange(0, cfg["kmax"] + 1)
    lam = lambda_of_ksq(ks.astype(float) ** 2, p)
    man.write_csv(
        "lambda_k.csv",
        ["k", "ksq", "lambda_k"],
        [(int(k), float(k * k), float(v)) for k, v in zip(ks, lam)],
    )
    man.finalize(True, {"rho_star": rs, "chi": chi(rs)})
    return ExperimentResult("theory-card", True, card, man.path("manifest.json"))


# ---------------------------------------------------------------------------
# exact-audit

EXACT_AUDIT_SCHEMA = {
    "a": (1.0, "creation base rate"),
    "b": (1.0, "annihilation rate"),
    "lam": (0.3, "interaction strength for the entropy-flow checks"),
    "n": (3, "torus side for the entropy-flow checks (d=1)"),
    "yau_times": ([0.01, 0.05, 0.1, 0.5, 1.0, 2.0], "entropy-flow grid"),
    "trials": (10_000, "randomized densities for the functional inequalities"),
    "tuples": (5, "random parameter tuples for the adjoint identity"),
    "seed_offset": (0, "extra seed decorrelation"),
}


def exact_audit(cfg: dict, out_dir, seed: int = 0, threads: int = 1) -> ExperimentResult:
    cfg = resolve_config(cfg, EXACT_AUDIT_SCHEMA, "exact-audit")
    man = ManifestWriter("exact-audit", out_dir, cfg, seed)
    rng = np.random.default_rng(seed + cfg["seed_offset"])
    summary = {}
    ok = True

    # adjoint identity across random parameter tuples, on n=4 d=1 and 2x2 d=2
    worst = 0.0
    for _ in range(cfg["tuples"]):
        a = float(rng.uniform(0.2, 3.0))
        b = float(rng.uniform(0.2, 3.0))
        lam = float(rng.uniform(-0.9 * a, 2.0))
        for n, d in [(4, 1), (2, 2)]:
            ra, rb = exact.adjoint_one(ModelParams(a, b, lam, d, n), return_routes=True)
            worst = max(worst, float(np.abs(ra - rb).max()))
    summary["adjoint_max_mismatch"] = worst
    ok &= worst < 1e-12 * 16

    # lam = 0 stationary state is the Bernoulli product
    p0 = ModelParams(cfg["a"], cfg["b"], 0.0, 1, 4)
    gen0 = exact.build_generator(p0)
    pi0 = exact.stationary_distribution(gen0)
    nu0 = exact.bernoulli_product(cfg["a"] / (cfg["a"] + cfg["b"]), 4)
    summary["tv_product_lam0"] = exact.total_variation(pi0, nu0)
    ok &= summary["tv_product_lam0"] < 1e-10

    # non-reversibility exhibit at n=4
    p_rev = ModelParams(cfg["a"], cfg["b"], cfg["lam"], 1, 4)
    gen_rev = exact.build_generator(p_rev)
    summary["cycle_gap_lam"] = exact.reversibility_cycle_gap(gen_rev)

    # entropy of the stationary state across n and lam
    h_rows = []
    for n in (3, 4):
        for lam in (0.1, 0.3):
            p = ModelParams(cfg["a"], cfg["b"], lam, 1, n)
            gen = exact.build_generator(p)
            pi = exact.stationary_distribution(gen)
            nu = exact.bernoulli_product(rho_star(p), n)
            h_rows.append((n, lam, exact.relative_entropy(pi, nu)))
    man.write_csv("ness_entropy.csv", ["n", "lam", "H"], h_rows)

    # the stationary vector itself for the configured system
    p_pi = ModelParams(cfg["a"], cfg["b"], cfg["lam"], 1, cfg["n"])
    gen_pi = exact.build_generator(p_pi)
    pi_vec = exact.stationary_distribution(gen_pi)
    nu_pi = exact.bernoulli_product(rho_star(p_pi), cfg["n"])
    man.write_csv(
        "stationary.csv",
        ["state", "pi", "nu_rho_star"],
        [(s, float(pi_vec[s]), float(nu_pi[s])) for s in range(gen_pi.n_states)],
    )

    # entropy-production inequality along the flow started from the product
    yau_rows = []
    yau_ok = True
    for lam in (0.1, cfg["lam"]):
        p = ModelParams(cfg["a"], cfg["b"], lam, 1, cfg["n"])
        rep = exact.yau_inequality_check(p, cfg["yau_times"])
        yau_ok &= rep.passed
        for r in rep.rows:
            yau_rows.append(
                (lam, r.t, r.H, r.dH, r.dissipation, r.source, r.slack)
            )
        summary[f"yau_limit_gap_lam{lam}"] = rep.limit_gap
    man.write_csv(
        "yau.csv",
        ["lam", "t", "H", "dH_dt", "dissipation", "source", "slack"],
        yau_rows,
    )
    summary["yau_ok"] = bool(yau_ok)
    ok &= yau_ok

    # functional inequalities, randomized
    p = ModelParams(cfg["a"], cfg["b"], cfg["lam"], 1, cfg["n"])
    ls = exact.log_sobolev_check(p, trials=cfg["trials"], seed=seed + 1)
    summary["log_sobolev_violations"] = ls.violations
    summary["log_sobolev_worst_ratio"] = ls.worst_ratio
    summary["log_sobolev_kappa"] = ls.kappa_used
    ok &= ls.passed

    nu = exact.bernoulli_product(rho_star(p), cfg["n"])
    S = 1 << cfg["n"]
    viol = 0
    for _ in range(cfg["trials"]):
        h = rng.normal(scale=rng.uniform(0.1, 3.0), size=S)
        f = np.exp(rng.normal(scale=rng.uniform(0.2, 2.0), size=S))
        f /= float(f @ nu)
        gamma = float(rng.uniform(0.05, 5.0))
        if not exact.entropy_inequality_check(h, f, gamma, nu):
            viol += 1
    summary["entropy_inequality_violations"] = viol
    ok &= viol == 0

    man.write_json("exact_audit.json", summary)
    man.finalize(bool(ok), summary)
    return ExperimentResult("exact-audit", bool(ok), summary, man.path("manifest.json"))


# ---------------------------------------------------------------------------
# hydro: particle system vs deterministic solution

HYDRO_SCHEMA = {
    "a": (1.0, "creation base rate"),
    "b": (1.0, "annihilation rate"),
    "lam": (0.2, "interaction strength"),
    "n_list": ([128, 512], "torus sides, increasing"),
    "grid": (16, "deterministic grid size M"),
    "amplitude": (0.2, "initial cosine amplitude around rho_star"),
    "times": ([0.1, 0.5], "comparison times"),
    "replicas": (20, "independent particle runs per n"),
    "dt": (1e-3, "deterministic solver step"),
    "l2_gate": (0.02, "L2 error gate at the final time, largest n"),
}


def hydro(cfg: dict, out_dir, seed: int = 0, threads: int = 2) -> ExperimentResult:
    cfg = resolve_config(cfg, HYDRO_SCHEMA, "hydro")
    man = ManifestWriter("hydro", out_dir, cfg, seed)
    p_ref = ModelParams(cfg["a"], cfg["b"], cfg["lam"], 1, max(cfg["n_list"]))
    rs = rho_star(p_ref)
    times = [float(t) for t in _as_list(cfg["times"])]
    M = cfg["grid"]

    x_grid = np.arange(M) / M
    u0_grid = rs + cfg["amplitude"] * np.cos(2 * math.pi * x_grid)
    traj = pde.solve_hydro(u0_grid, max(times), p_ref, M, dt=cfg["dt"], record_times=times)
    man.write_csv(
        "pde_trajectory.csv",
        ["t"] + [f"u{j}" for j in range(M)],
        [(t, *prof) for t, prof in zip(traj.times, traj.profiles)],
    )

    rows = []
    errors_by_n = {}
    events = 0
    for n in _as_list(cfg["n_list"]):
        p = ModelParams(cfg["a"], cfg["b"], cfg["lam"], 1, int(n))
        ell = int(n) // M
        x_sites = np.arange(int(n)) / int(n)
        probs = rs + cfg["amplitude"] * np.cos(2 * math.pi * x_sites)
        sim = SimConfig(
            params=p,
            seed=seed,
            total_time=max(times) + 1e-9,
            sample_interval=times[0],
            burn_in=0.0,
            replicas=cfg["replicas"],
            record_configs=True,
            init=probs,
            threads=threads,
        )
        streams = run(sim)
        events += sum(s.events for s in streams)
        sample_idx = [int(round(t / times[0])) - 1 for t in times]
        centers = (np.arange(M) * ell + (ell - 1)) / int(n)
        for t, j in zip(times, sample_idx):
            block = np.zeros(M)
            for s in streams:
                dens = fields.block_average_field(
                    s.configs[j].astype(float), ell, 0.0, int(n), 1
                )
                block += dens[:: ell][:M]
            block /= len(streams)
            ref = pde.evaluate_profile(
                traj.profiles[times.index(t)], centers[:, None], M, 1
            )
            l2 = float(np.sqrt(np.mean((block - ref) ** 2)))
            rows.append((int(n), t, l2))
            errors_by_n.setdefault(int(n), {})[t] = l2
    man.telemetry["events"] = events
    man.write_csv("hydro_compare.csv", ["n", "t", "l2_error"], rows)

    ns = sorted(errors_by_n)
    t_final = times[-1]
    gate = errors_by_n[ns[-1]][t_final] < cfg["l2_gate"]
    trend = errors_by_n[ns[-1]][t_final] < errors_by_n[ns[0]][t_final]
    summary = {
        "errors": {str(n): errors_by_n[n] for n in ns},
        "l2_final_largest_n": errors_by_n[ns[-1]][t_final],
        "gate": bool(gate),
        "decreasing_in_n": bool(trend),
    }
    ok = bool(gate and trend)
    man.write_json("hydro_summary.json", summary)
    man.finalize(ok, summary)
    return ExperimentResult("hydro", ok, summary, man.path("manifest.json"))


# ---------------------------------------------------------------------------
# hydrostatics-scaling

HYDROSTATICS_SCHEMA = {
    "a": (1.0, "creation base rate"),
    "b": (1.0, "annihilation rate"),
    "lam": (0.2, "interaction strength"),
    "n_list": ([64, 128, 256, 512], "torus sides for the scaling fit"),
    "total_time": (165.0, "model time per replica"),
    "burn_in": (5.0, "discarded prefix"),
    "sample_interval": (0.25, "sampling cadence"),
    "replicas": (2, "independent replicas per n"),
    "slope_tol": (0.15, "allowed deviation of the log-log slope from -1"),
}


def hydrostatics_scaling(
    cfg: dict, out_dir, seed: int = 0, threads: int = 2
) -> ExperimentResult:
    cfg = resolve_config(cfg, HYDROSTATICS_SCHEMA, "hydrostatics-scaling")
    man = ManifestWriter("hydrostatics-scaling", out_dir, cfg, seed)
    records = []
    events = 0
    for n in _as_list(cfg["n_list"]):
        p = ModelParams(cfg["a"], cfg["b"], cfg["lam"], 1, int(n))
        rs = rho_star(p)
        sim = SimConfig(
            params=p,
            seed=seed,
            total_time=cfg["total_time"],
            sample_interval=cfg["sample_interval"],
            burn_in=cfg["burn_in"],
            replicas=cfg["replicas"],
            threads=threads,
        )
        streams = run(sim)
        events += sum(s.events for s in streams)
        y = np.concatenate([(s.mean_density - rs) ** 2 for s in streams])
        # the bulk density relaxes at rate |F'(rho_star)|
        tau = 1.0 / abs(F_prime(rs, p))
        batch = max(1, int(math.ceil(20.0 * tau / cfg["sample_interval"])))
        nb = y.size // batch
        bm = y[: nb * batch].reshape(nb, batch).mean(axis=1)
        msq = float(y.mean())
        se = float(bm.std(ddof=1) / math.sqrt(nb))
        records.append((int(n), msq, se))
    man.telemetry["events"] = events

    ns = np.array([r[0] for r in records], dtype=float)
    msqs = np.array([r[1] for r in records])
    slope, intercept = np.polyfit(np.log(ns), np.log(msqs), 1)
    rows = [
        (int(n), msq, se, g_d(n, 1) / n**2, float(slope), float(intercept))
        for (n, msq, se) in records
    ]
    man.write_csv(
        "hydrostatics.csv",
        ["n", "msq", "stderr", "gd_over_n2", "fit_slope", "fit_intercept"],
        rows,
    )
    ok = abs(slope + 1.0) <= cfg["slope_tol"]
    summary = {"slope": float(slope), "intercept": float(intercept), "gate": bool(ok)}
    man.write_json("hydrostatics_summary.json", summary)
    man.finalize(bool(ok), summary)
    return ExperimentResult("hydrostatics-scaling", bool(ok), summary, man.path("manifest.json"))


# ---------------------------------------------------------------------------
# clt-spectrum

CLT_SCHEMA = {
    **_PARAM_KEYS,
    "total_time": (2000.0, "model time per replica"),
    "sample_interval": (0.01, "sampling cadence"),
    "replicas": (8, "independent replicas"),
    "kmax": (16, "largest mode compared"),
    "se_gate": (3.0, "per-mode agreement gate in standard errors"),
    "min_modes_within": (15, "modes (of kmax) required within the gate"),
    "z_gate": (4.0, "aggregate whiteness-rejection gate"),
}


def clt_spectrum(cfg: dict, out_dir, seed: int = 0, threads: int = 2) -> ExperimentResult:
    cfg = resolve_config(cfg, CLT_SCHEMA, "clt-spectrum")
    man = ManifestWriter("clt-spectrum", out_dir, cfg, seed)
    p = _params_from(cfg)
    sim = SimConfig(
        params=p,
        seed=seed,
        total_time=cfg["total_time"],
        sample_interval=cfg["sample_interval"],
        replicas=cfg["replicas"],
        kmax=cfg["kmax"],
        threads=threads,
    )
    streams = run(sim)
    man.telemetry["events"] = sum(s.events for s in streams)
    rows = fields.spectrum_estimate(streams)
    # whiteness is tested on all measured modes (zero mode included: the
    # long-range enhancement of the spectrum peaks there); the per-mode
    # agreement clause covers 1 <= |k| <= kmax only
    z_agg = fields.whiteness_z(rows, p)
    csv_rows = [
        (*r.kvec, r.variance, r.stderr, r.lam_theory, r.z, r.tau_int, r.batches)
        for r in rows
    ]
    kcols = [f"k{i+1}" for i in range(p.d)]
    man.write_csv(
        "spectrum.csv",
        kcols + ["variance", "stderr", "lambda_theory", "z", "tau_int", "batches"],
        csv_rows,
    )
    nonzero = [r for r in rows if not fields.is_zero_mode(r)]
    within = sum(1 for r in nonzero if abs(r.z) <= cfg["se_gate"])
    mode_gate = within >= cfg["min_modes_within"]
    z_gate = z_agg > cfg["z_gate"]
    summary = {
        "modes_within_gate": within,
        "modes_total": len(rows),
        "mode_gate": bool(mode_gate),
        "whiteness_z": float(z_agg),
        "z_gate": bool(z_gate),
        "chi": chi(rho_star(p)),
    }
    ok = bool(mode_gate and z_gate)
    man.write_json("clt_summary.json", summary)
    man.finalize(ok, summary)
    return ExperimentResult("clt-spectrum", ok, summary, man.path("manifest.json"))


# ---------------------------------------------------------------------------
# localeq-sweep

LOCALEQ_SCHEMA = {
    "a": (1.0, "creation base rate"),
    "b": (1.0, "annihilation rate"),
    "lam": (0.3, "interaction strength"),
    "n_list": ([256, 1024], "torus sides, increasing"),
    "R": (1, "box radius"),
    "total_time": (31.0, "model time per replica"),
    "burn_in": (5.0, "discarded prefix"),
    "sample_interval": (0.1, "configuration sampling cadence"),
    "replicas": (8, "independent replicas per n"),
    "bootstrap": (200, "bootstrap resamples over configurations"),
}


def localeq_sweep(cfg: dict, out_dir, seed: int = 0, threads: int = 2) -> ExperimentResult:
    cfg = resolve_config(cfg, LOCALEQ_SCHEMA, "localeq-sweep")
    man = ManifestWriter("localeq-sweep", out_dir, cfg, seed)
    R = cfg["R"]
    rows = []
    estimates = {}
    pinsker_all = True
    events = 0
    for n in _as_list(cfg["n_list"]):
        p = ModelParams(cfg["a"], cfg["b"], cfg["lam"], 1, int(n))
        rs = rho_star(p)
        sim = SimConfig(
            params=p,
            seed=seed,
            total_time=cfg["total_time"],
            sample_interval=cfg["sample_interval"],
            burn_in=cfg["burn_in"],
            replicas=cfg["replicas"],
            record_configs=True,
            threads=threads,
        )
        streams = run(sim)
        events += sum(s.events for s in streams)
        marg = localeq.merge_marginals(
            [localeq.collect_marginal(s.configs, R, int(n), 1) for s in streams]
        )
        est = localeq.tv_to_product(marg, rs, bootstrap=cfg["bootstrap"], seed=seed)
        pinsker_all &= localeq.pinsker_audit(marg, rs)
        estimates[int(n)] = est
        rows.append((int(n), R, cfg["lam"], est.tv, est.stderr, est.bias_floor))
    man.telemetry["events"] = events
    man.write_csv(
        "localeq.csv", ["n", "R", "lam", "tv", "stderr", "bias_floor"], rows
    )
    ns = sorted(estimates)
    lo, hi = estimates[ns[0]], estimates[ns[-1]]
    sep = (lo.tv - hi.tv) / math.hypot(lo.stderr, hi.stderr)
    # smaller beyond error bars = the 1-SE intervals do not overlap
    decay = hi.tv + hi.stderr < lo.tv - lo.stderr
    summary = {
        "tv": {str(n): estimates[n].tv for n in ns},
        "bias_floor": {str(n): estimates[n].bias_floor for n in ns},
        "separation_z": float(sep),
        "decay_gate": bool(decay),
        "pinsker_ok": bool(pinsker_all),
    }
    ok = bool(decay and pinsker_all)
    man.write_json("localeq_summary.json", summary)
    man.finalize(ok, summary)
    return ExperimentResult("localeq-sweep", ok, summary, man.path("manifest.json"))


# ---------------------------------------------------------------------------
# flow-audit

FLOW_SCHEMA = {
    "d_list": ([1, 2, 3], "dimensions"),
    "ell_min": (2, "smallest block size"),
    "ell_max": (8, "largest block size"),
    "residual_gate": (1e-12, "divergence identity residual gate"),
    "ratio_gate": (10.0, "max/min gate for energy / g_d(ell)"),
}


def flow_audit(cfg: dict, out_dir, seed: int = 0, threads: int = 1) -> ExperimentResult:
    cfg = resolve_config(cfg, FLOW_SCHEMA, "flow-audit")
    man = ManifestWriter("flow-audit", out_dir, cfg, seed)
    rows = []
    ok = True
    worst_resid = 0.0
    ratios = {}
    rng = np.random.default_rng(seed)
    for d in _as_list(cfg["d_list"]):
        rep = flows.energy_scaling(range(cfg["ell_min"], cfg["ell_max"] + 1), int(d))
        ratios[int(d)] = rep.ratio_max_min()
        ok &= rep.ratio_max_min() < cfg["ratio_gate"]
        for r in rep.rows:
            n = 4 * r.ell + 2
            fl = flows.build_flow(r.ell, n, int(d))
            resid = flows.divergence_residual(fl)
            worst_resid = max(worst_resid, resid)
            ok &= resid < cfg["residual_gate"]
            ok &= fl.support_in_cube(2 * r.ell - 1)
            delta, q = flows.delta_and_q(r.ell, n, int(d))
            for _ in range(5):
                g = rng.normal(size=n ** int(d))
                ok &= flows.divergence_formula_check(fl, delta, q, g)
            rows.append((int(d), r.ell, r.energy, r.energy_over_gd, r.min_energy))
    man.write_csv(
        "flows.csv", ["d", "ell", "energy", "energy_over_gd", "min_energy"], rows
    )
    summary = {
        "ratio_max_min": {str(k): v for k, v in ratios.items()},
        "worst_divergence_residual": worst_resid,
        "gate": bool(ok),
    }
    man.write_json("flow_summary.json", summary)
    man.finalize(bool(ok), summary)
    return ExperimentResult("flow-audit", bool(ok), summary, man.path("manifest.json"))


# ---------------------------------------------------------------------------
# spde-audit

SPDE_SCHEMA = {
    **_PARAM_KEYS,
    "kmax": (8, "largest sampled mode"),
    "samples": (100_000, "stationary draws"),
    "lag_dt": (0.02, "lag unit for the autocovariance check"),
    "lag_steps": (5, "number of lags"),
    "lag_batch": (8000, "chains for the autocovariance check"),
    "identity_tol": (1e-8, "semigroup integral identity tolerance"),
}


def spde_audit(cfg: dict, out_dir, seed: int = 0, threads: int = 1) -> ExperimentResult:
    cfg = resolve_config(cfg, SPDE_SCHEMA, "spde-audit")
    man = ManifestWriter("spde-audit", out_dir, cfg, seed)
    p = _params_from(cfg)
    rng = np.random.default_rng(seed)
    ok = True

    kvecs, lam, coef = spde.sample_stationary_batch(p, cfg["kmax"], rng, cfg["samples"])
    y = (coef * np.conj(coef)).real
    emp = y.mean(axis=0)
    se = y.std(axis=0, ddof=1) / math.sqrt(y.shape[0])
    z = np.where(se > 0, (emp - lam) / np.where(se > 0, se, 1.0), 0.0)
    rows = [
        (*map(int, kvecs[j]), float(lam[j]), float(emp[j]), float(se[j]), float(z[j]))
        for j in range(len(kvecs))
    ]
    kcols = [f"k{i+1}" for i in range(p.d)]
    man.write_csv(
        "spde_modes.csv", kcols + ["lambda_theory", "variance", "stderr", "z"], rows
    )
    ok &= bool(np.all(np.abs(z) <= 3.0) or np.mean(np.abs(z) <= 3.0) > 0.997)

    # stationary autocovariance lam_k exp(theta_k s)
    kv2, lam2, traj = spde.ou_mode_trajectories(
        p, min(cfg["kmax"], 4), cfg["lag_dt"], cfg["lag_steps"], cfg["lag_batch"], rng
    )
    theta = spde.theta_of_ksq((kv2.astype(float) ** 2).sum(axis=1), p)
    worst_lag_z = 0.0
    for s in range(1, cfg["lag_steps"] + 1):
        prod = (traj[:, 0] * np.conj(traj[:, s])).real
        emp_l = prod.mean(axis=0)
        se_l = prod.std(axis=0, ddof=1) / math.sqrt(prod.shape[0])
        target = lam2 * np.exp(theta * s * cfg["lag_dt"])
        worst_lag_z = max(worst_lag_z, float(np.abs((emp_l - target) / se_l).max()))
    ok &= worst_lag_z <= 3.5

    # semigroup integral identity by quadrature
    ks = np.arange(-cfg["kmax"], cfg["kmax"] + 1).astype(float)
    worst_gap = 0.0
    for _ in range(5):
        fh = rng.normal(size=ks.size) + 1j * rng.normal(size=ks.size)
        worst_gap = max(
            worst_gap, pde.semigroup_integral_identity_gap(fh, ks**2, p)
        )
    ok &= worst_gap < cfg["identity_tol"]

    summary = {
        "max_mode_abs_z": float(np.abs(z).max()),
        "worst_lag_z": worst_lag_z,
        "integral_identity_gap": worst_gap,
        "gate": bool(ok),
    }
    man.write_json("spde_summary.json", summary)
    man.finalize(bool(ok), summary)
    return ExperimentResult("spde-audit", bool(ok), summary, man.path("manifest.json"))


EXPERIMENTS = {
    "theory-card": (THEORY_CARD_SCHEMA, theory_card),
    "exact-audit": (EXACT_AUDIT_SCHEMA, exact_audit),
    "hydro": (HYDRO_SCHEMA, hydro),
    "hydrostatics-scaling": (HYDROSTATICS_SCHEMA, hydrostatics_scaling),
    "clt-spectrum": (CLT_SCHEMA, clt_spectrum),
    "localeq-sweep": (LOCALEQ_SCHEMA, localeq_sweep),
    "flow-audit": (FLOW_SCHEMA, flow_audit),
    "spde-audit": (SPDE_SCHEMA, spde_audit),
}


def run_experiment(name: str, cfg: dict, out_dir, seed: int = 0, threads: int = 2):
    if name not in EXPERIMENTS:
        raise KeyError(f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}")
    _, fn = EXPERIMENTS[name]
    return fn(cfg, out_dir, seed=seed, threads=threads)
