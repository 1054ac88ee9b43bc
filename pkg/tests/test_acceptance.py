"""End-to-end acceptance gates.

One test per criterion, each printing a PASS/FAIL line with the measured
numbers (run with ``pytest tests/test_acceptance.py -s`` to see them).  The
heavy stationary-state experiments (criteria 6, 7, 9) run the production
pipelines at their pinned parameters and take several minutes each on two
cores; everything else is seconds.  The d=2 variant of the fluctuation
experiment carries the ``slow`` marker and is deselected by default.
"""

import math

import numpy as np
import pytest

from rdex import exact, fields, flows, localeq, pde, spde, theory
from rdex.experiments import (
    clt_spectrum,
    exact_audit,
    flow_audit,
    hydro,
    hydrostatics_scaling,
    localeq_sweep,
    spde_audit,
)
from rdex.theory import ModelParams, chi, lambda_of_ksq, rho_star

pytestmark = pytest.mark.acceptance

SEED = 20260810


def _report(num: int, name: str, ok: bool, detail: str) -> None:
    print(f"\nACCEPTANCE {num:2d} [{name}]: {'PASS' if ok else 'FAIL'} ({detail})")


# -- criterion 1: adjoint identity ------------------------------------------


def test_c01_adjoint_identity():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(5):
        a = float(rng.uniform(0.2, 3.0))
        b = float(rng.uniform(0.2, 3.0))
        lam = float(rng.uniform(-0.9 * a, 2.0))
        for n, d in [(4, 1), (2, 2)]:
            ra, rb = exact.adjoint_one(
                ModelParams(a, b, lam, d, n), return_routes=True
            )
            worst = max(worst, float(np.abs(ra - rb).max()))
    ok = worst < 1e-12 * 16
    _report(1, "adjoint identity", ok, f"max pointwise mismatch {worst:.3e}")
    assert ok


# -- criterion 2: exact NESS at lam = 0 --------------------------------------


def test_c02_product_ness_lambda_zero():
    p = ModelParams(1.3, 0.9, 0.0, 1, 4)
    gen = exact.build_generator(p)
    pi = exact.stationary_distribution(gen)
    nu = exact.bernoulli_product(1.3 / 2.2, 4)
    tv = exact.total_variation(pi, nu)
    ok = tv < 1e-10
    _report(2, "product NESS at lam=0", ok, f"TV {tv:.3e}")
    assert ok


# -- criterion 3: entropy-production inequality ------------------------------


def test_c03_entropy_production_inequality():
    grid = [0.01, 0.05, 0.1, 0.5, 1.0, 2.0]
    ok = True
    details = []
    for lam in (0.1, 0.3):
        rep = exact.yau_inequality_check(ModelParams(1.0, 1.0, lam, 1, 3), grid)
        worst_slack = min(r.slack for r in rep.rows)
        ok &= worst_slack >= -1e-6 and rep.limit_gap < 1e-8
        details.append(f"lam={lam}: min slack {worst_slack:.2e}, limit gap {rep.limit_gap:.2e}")
    _report(3, "entropy production inequality", ok, "; ".join(details))
    assert ok


# -- criterion 4: log-Sobolev and entropy inequality --------------------------


def test_c04_functional_inequalities():
    p = ModelParams(1.0, 1.0, 0.3, 1, 3)
    ls = exact.log_sobolev_check(p, trials=10_000, seed=SEED)
    nu = exact.bernoulli_product(rho_star(p), 3)
    rng = np.random.default_rng(SEED + 1)
    viol = 0
    for _ in range(10_000):
        h = rng.normal(scale=rng.uniform(0.1, 3.0), size=8)
        f = np.exp(rng.normal(scale=rng.uniform(0.2, 2.0), size=8))
        f /= float(f @ nu)
        if not exact.entropy_inequality_check(h, f, float(rng.uniform(0.05, 5.0)), nu):
            viol += 1
    ok = ls.violations == 0 and viol == 0
    _report(
        4,
        "log-Sobolev + entropy inequality",
        ok,
        f"log-Sobolev 0/{ls.trials} violations (worst ratio {ls.worst_ratio:.3f} "
        f"vs kappa {ls.kappa_used:.3f}); entropy inequality {viol}/10000 violations",
    )
    assert ok


# -- criterion 5: spectrum formula consistency --------------------------------


def test_c05_spectrum_consistency():
    rng = np.random.default_rng(SEED)
    checked = 0
    for _ in range(1000):
        a = float(rng.uniform(0.1, 4.0))
        b = float(rng.uniform(0.1, 4.0))
        lam = float(rng.uniform(-0.9 * a, 4.0))
        d = int(rng.integers(1, 4))
        p = ModelParams(a, b, lam, d, 8)
        ksq = rng.integers(0, 10_000, size=100).astype(float)
        lambda_of_ksq(ksq, p)  # raises InconsistencyError on disagreement
        checked += 100
    p0 = ModelParams(1.7, 0.6, 0.0, 2, 8)
    ch = chi(rho_star(p0))
    flat = lambda_of_ksq(np.arange(100.0), p0)
    collapse = np.abs(flat - ch).max()
    ok = checked == 100_000 and collapse < 1e-15
    _report(
        5,
        "spectrum formula consistency",
        ok,
        f"{checked} (k, params) pairs at 1e-12 relative; lam=0 collapse {collapse:.1e}",
    )
    assert ok


# -- criteria 6-9: stationary-state experiments -------------------------------


@pytest.fixture(scope="module")
def clt_result(tmp_path_factory):
    out = tmp_path_factory.mktemp("clt")
    return clt_spectrum({}, out, seed=SEED, threads=2)


def test_c06_clt_spectrum(clt_result):
    s = clt_result.summary
    detail = (
        f"{s['modes_within_gate']}/16 modes within 3 SE; whiteness z "
        f"{s['whiteness_z']:.2f} (gate > 4)"
    )
    _report(6, "stationary fluctuation spectrum", clt_result.passed, detail)
    assert s["mode_gate"], detail
    assert s["z_gate"], detail


def test_c07_quantitative_hydrostatics(tmp_path):
    res = hydrostatics_scaling({}, tmp_path, seed=SEED, threads=2)
    s = res.summary
    detail = f"log-log slope {s['slope']:.3f} (gate -1 +/- 0.15)"
    _report(7, "quantitative hydrostatics", res.passed, detail)
    assert res.passed, detail


def test_c08_hydrodynamic_limit(tmp_path):
    res = hydro({}, tmp_path, seed=SEED, threads=2)
    s = res.summary
    detail = (
        f"L2 error {s['l2_final_largest_n']:.4f} at t=0.5 n=512 (gate < 0.02); "
        f"decreasing in n: {s['decreasing_in_n']}"
    )
    _report(8, "hydrodynamic limit", res.passed, detail)
    assert res.passed, detail


def test_c09_local_equilibrium(tmp_path):
    res = localeq_sweep({}, tmp_path, seed=SEED, threads=2)
    s = res.summary
    detail = (
        f"TV {s['tv']} floors {s['bias_floor']} separation z {s['separation_z']:.2f}; "
        f"Pinsker {s['pinsker_ok']}"
    )
    _report(9, "local equilibrium", res.passed, detail)
    assert res.passed, detail


# -- criterion 10: flows -------------------------------------------------------


def test_c10_flow_audit(tmp_path):
    res = flow_audit({}, tmp_path, seed=SEED)
    s = res.summary
    detail = (
        f"divergence residual {s['worst_divergence_residual']:.2e} (gate 1e-12); "
        f"energy/g_d ratios {s['ratio_max_min']} (gate < 10)"
    )
    _report(10, "flow audit", res.passed, detail)
    assert res.passed, detail


# -- criterion 11: Gaussian field audit ---------------------------------------


def test_c11_spde_audit(tmp_path):
    res = spde_audit({}, tmp_path, seed=SEED)
    s = res.summary
    detail = (
        f"mode-variance max |z| {s['max_mode_abs_z']:.2f}; lag-cov max |z| "
        f"{s['worst_lag_z']:.2f}; integral identity gap {s['integral_identity_gap']:.1e}"
    )
    _report(11, "stationary Gaussian field audit", res.passed, detail)
    assert res.passed, detail


# -- criterion 12: concentration lemmas ----------------------------------------


def test_c12_concentration_lemmas():
    checks = [
        theory.hoeffding_check(theory.bernoulli(0.5), 1.0, seed=SEED),
        theory.hoeffding_check(theory.constant(1.0), 2.0, seed=SEED),
        theory.hoeffding_check(theory.uniform(0.0, 1.0), 2.0, seed=SEED),
        theory.subgaussian_check(1.0, 0.0, seed=SEED),
        theory.subgaussian_check(1.0, 0.25, samples=400_000, seed=SEED),
        theory.subgaussian_check(2.0, 0.2, samples=400_000, seed=SEED),
    ]
    ok = all(c.passed for c in checks)
    detail = "; ".join(f"est {c.estimate:.4f} vs bound {c.bound:.4f}" for c in checks)
    _report(12, "concentration lemmas", ok, detail)
    assert ok


# -- criterion 13: entropy-vs-white-noise sum -----------------------------------


def test_c13_gaussian_entropy_sum():
    ok = True
    details = []
    for K in (1, 10, 50):
        val = theory.gaussian_entropy_sum(ModelParams(1.0, 1.0, 0.0, 1, 8), K)
        ok &= val == 0.0
    details.append("lam=0: sum identically 0")
    p1 = ModelParams(1.0, 1.0, 0.2, 1, 8)
    s50, s100, s200 = (theory.gaussian_entropy_sum(p1, K) for K in (50, 100, 200))
    cauchy_d1 = 0 < s200 - s100 < s100 - s50
    ok &= cauchy_d1
    details.append(f"d=1 increments {s100 - s50:.2e} > {s200 - s100:.2e}")
    p2 = ModelParams(1.0, 1.0, 0.3, 2, 8)
    t20, t40, t80 = (theory.gaussian_entropy_sum(p2, K) for K in (20, 40, 80))
    ok &= 0 < t80 - t40 < t40 - t20
    # per-term decay |k|^-4 makes the K -> 2K shell sum scale like K^{d-4}
    for d, lam in ((1, 0.2), (2, 0.3), (3, 0.3)):
        p = ModelParams(1.0, 1.0, lam, d, 8)
        Ks = [4, 8, 16, 32]
        shells = [
            theory.gaussian_entropy_sum(p, 2 * K) - theory.gaussian_entropy_sum(p, K)
            for K in Ks
        ]
        slope = float(np.polyfit(np.log(Ks), np.log(shells), 1)[0])
        ok &= abs(slope - (d - 4.0)) < 0.3
        details.append(f"d={d} shell slope {slope:.2f} (expect {d - 4})")
    _report(13, "entropy sum vs white noise", ok, "; ".join(details))
    assert ok


# -- slow-suite: d=2 fluctuation spectrum ---------------------------------------


@pytest.mark.slow
def test_c06s_clt_spectrum_d2(tmp_path):
    cfg = {"d": 2, "n": 64, "kmax": 4, "min_modes_within": 22}
    res = clt_spectrum(cfg, tmp_path, seed=SEED, threads=2)
    s = res.summary
    detail = (
        f"{s['modes_within_gate']}/{s['modes_total'] - 1} modes within 3 SE; "
        f"whiteness z {s['whiteness_z']:.2f}"
    )
    _report(6, "fluctuation spectrum d=2 (slow)", res.passed, detail)
    assert res.passed, detail
