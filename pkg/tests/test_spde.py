import math

import numpy as np
import pytest

from rdex import spde
from rdex.theory import ModelParams, chi, lambda_of_ksq, rho_star


def P(lam=0.4, d=1):
    return ModelParams(1.0, 1.0, lam, d, 8)


def test_lambda_zero_white_noise():
    p = P(lam=0.0)
    rng = np.random.default_rng(0)
    _, lam, coef = spde.sample_stationary_batch(p, 6, rng, 20_000)
    ch = chi(rho_star(p))
    assert np.allclose(lam, ch)
    emp = (coef * np.conj(coef)).real.mean(axis=0)
    se = (coef * np.conj(coef)).real.std(axis=0, ddof=1) / math.sqrt(20_000)
    assert np.all(np.abs(emp - ch) < 4 * se)


def test_stationary_mode_variances():
    p = P(lam=0.6)
    rng = np.random.default_rng(1)
    kvecs, lam, coef = spde.sample_stationary_batch(p, 8, rng, 50_000)
    y = (coef * np.conj(coef)).real
    emp = y.mean(axis=0)
    se = y.std(axis=0, ddof=1) / math.sqrt(y.shape[0])
    assert np.all(np.abs(emp - lam) < 3.5 * se)


def test_hermitian_structure():
    p = P()
    rng = np.random.default_rng(2)
    fs = spde.sample_stationary(p, 5, rng)
    for k in range(1, 6):
        assert fs.coefficient((-k,)) == pytest.approx(np.conj(fs.coefficient((k,))))
    assert abs(fs.coefficient((0,)).imag) == 0.0


def test_quadratic_form_oracle():
    # E[X(f)^2] for f = cos(2 pi x): two conjugate modes, each |fhat| = 1/2
    p = P(lam=0.5)
    rng = np.random.default_rng(3)
    kvecs, lam, coef = spde.sample_stationary_batch(p, 2, rng, 60_000)
    index = {tuple(k): i for i, k in enumerate(kvecs)}
    fhat = np.zeros(len(kvecs), dtype=complex)
    fhat[index[(1,)]] = 0.5
    fhat[index[(-1,)]] = 0.5
    vals = np.real(coef @ fhat)
    lam1 = lambda_of_ksq(np.array([1.0]), p)[0]
    target = 2 * lam1 * 0.25
    emp = float(vals @ vals) / len(vals)
    se = float(np.std(vals**2, ddof=1) / math.sqrt(len(vals)))
    assert abs(emp - target) < 3.5 * se


def test_covariance_check_battery():
    p = P(lam=0.4)
    rng = np.random.default_rng(4)
    rows = spde.covariance_check(p, 3, 50_000, rng)
    for r in rows:
        assert abs(r.z) < 3.5


def test_covariance_check_d2():
    p = ModelParams(1.0, 1.0, 0.4, 2, 8)
    rng = np.random.default_rng(5)
    rows = spde.covariance_check(p, 2, 40_000, rng)
    for r in rows:
        assert abs(r.z) < 3.5


def test_noiseless_decay():
    p = P(lam=0.3)
    rng = np.random.default_rng(6)
    fs = spde.sample_stationary(p, 4, rng)
    out = spde.decay_only(fs, 0.2)
    theta = spde.theta_of_ksq(fs.ksq(), p)
    assert np.allclose(out.coef, fs.coef * np.exp(theta * 0.2))


def test_ou_variance_growth_from_zero():
    p = P(lam=0.5)
    rng = np.random.default_rng(7)
    kvecs, lam, coef = spde.sample_stationary_batch(p, 3, rng, 30_000)
    state = spde.GaussianFieldSample(kvecs, np.zeros_like(coef[0]), lam, p)
    # batch: evolve all chains one step of length t from zero
    t = 0.05
    ksq = state.ksq()
    decay = np.exp(spde.theta_of_ksq(ksq, p) * t)
    inj = np.sqrt(lam * (1.0 - decay**2))
    noise = spde._hermitian_noise(kvecs, rng, 30_000)
    coefs = noise * inj
    y = (coefs * np.conj(coefs)).real
    target = lam * (1.0 - decay**2)
    se = y.std(axis=0, ddof=1) / math.sqrt(y.shape[0])
    nz = target > 0
    assert np.all(np.abs(y.mean(axis=0) - target)[nz] < 3.5 * se[nz])
    # cross-check against Duhamel quadrature of the injected noise power
    from scipy.integrate import quad

    sig2 = spde.noise_power_of_ksq(ksq, p)
    for j in np.nonzero(nz)[0][:3]:
        th = spde.theta_of_ksq(ksq[j : j + 1], p)[0]
        integral, _ = quad(lambda s: math.exp(2 * th * s), 0, t)
        assert target[j] == pytest.approx(sig2[j] * integral, rel=1e-10)


def test_ou_stationarity_preserved():
    p = P(lam=0.5)
    rng = np.random.default_rng(8)
    kvecs, lam, coef = spde.sample_stationary_batch(p, 3, rng, 40_000)
    decay = np.exp(spde.theta_of_ksq((kvecs.astype(float) ** 2).sum(axis=1), p) * 0.1)
    inj = np.sqrt(lam * (1.0 - decay**2))
    coef = coef * decay + spde._hermitian_noise(kvecs, rng, 40_000) * inj
    y = (coef * np.conj(coef)).real
    se = y.std(axis=0, ddof=1) / math.sqrt(y.shape[0])
    assert np.all(np.abs(y.mean(axis=0) - lam) < 3.5 * se)


def test_ou_composition_in_law():
    # one step of 0.3 vs two steps of 0.15: same mean/var/lag structure
    p = P(lam=0.4)
    rng = np.random.default_rng(9)
    kvecs, lam, traj1 = spde.ou_mode_trajectories(p, 2, 0.3, 1, 20_000, rng)
    _, _, traj2 = spde.ou_mode_trajectories(p, 2, 0.15, 2, 20_000, rng)
    a = traj1[:, -1]
    b = traj2[:, -1]
    va = (a * np.conj(a)).real.mean(axis=0)
    vb = (b * np.conj(b)).real.mean(axis=0)
    se = (a * np.conj(a)).real.std(axis=0, ddof=1) / math.sqrt(a.shape[0]) * 1.5
    assert np.all(np.abs(va - vb) < 4 * se + 1e-12)


def test_stationary_lag_covariance():
    p = P(lam=0.5)
    rng = np.random.default_rng(10)
    dt = 0.02
    steps = 5
    kvecs, lam, traj = spde.ou_mode_trajectories(p, 2, dt, steps, 8_000, rng)
    theta = spde.theta_of_ksq((kvecs.astype(float) ** 2).sum(axis=1), p)
    for s in (1, 3, 5):
        prod = (traj[:, 0] * np.conj(traj[:, s])).real
        emp = prod.mean(axis=0)
        se = prod.std(axis=0, ddof=1) / math.sqrt(prod.shape[0])
        target = lam * np.exp(theta * s * dt)
        assert np.all(np.abs(emp - target) < 3.5 * se)


def test_ou_long_time_reaches_stationary_law():
    p = P(lam=0.5)
    rng = np.random.default_rng(11)
    kvecs, lam, _ = spde.sample_stationary_batch(p, 2, rng, 1)
    state = np.zeros((30_000, len(kvecs)), dtype=complex)
    ksq = (kvecs.astype(float) ** 2).sum(axis=1)
    decay = np.exp(spde.theta_of_ksq(ksq, p) * 3.0)  # >> relaxation time
    inj = np.sqrt(lam * (1.0 - decay**2))
    state = state * decay + spde._hermitian_noise(kvecs, rng, 30_000) * inj
    y = (state * np.conj(state)).real
    se = y.std(axis=0, ddof=1) / math.sqrt(y.shape[0])
    assert np.all(np.abs(y.mean(axis=0) - lam) < 3.5 * se)


def test_spde_coefficients_reproduce_spectrum():
    # sigma_k^2 / (-2 theta_k) == lam_k exactly
    for lam_r in (-0.4, 0.0, 0.7):
        p = P(lam=lam_r)
        ksq = np.arange(0, 30).astype(float)
        lhs = spde.noise_power_of_ksq(ksq, p) / (-2.0 * spde.theta_of_ksq(ksq, p))
        rhs = lambda_of_ksq(ksq, p)
        assert np.abs(lhs - rhs).max() < 1e-12 * max(1.0, np.abs(rhs).max())


def test_evolve_requires_positive_dt():
    p = P()
    rng = np.random.default_rng(12)
    fs = spde.sample_stationary(p, 2, rng)
    with pytest.raises(ValueError):
        spde.evolve_ou(fs, 0.0, rng)
