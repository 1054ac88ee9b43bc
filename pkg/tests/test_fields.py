import math

import numpy as np
import pytest

from rdex import fields
from rdex.theory import ModelParams, chi, rho_star


def test_fluctuation_field_constant():
    n = 16
    occ = np.ones(n)
    assert fields.fluctuation_field(occ, np.ones(n), 0.3) == pytest.approx(
        math.sqrt(n) * 0.7
    )


def test_fluctuation_field_linearity():
    rng = np.random.default_rng(0)
    occ = (rng.random(32) < 0.5).astype(float)
    f = rng.normal(size=32)
    g = rng.normal(size=32)
    lhs = fields.fluctuation_field(occ, 2.0 * f + g, 0.4)
    rhs = 2.0 * fields.fluctuation_field(occ, f, 0.4) + fields.fluctuation_field(
        occ, g, 0.4
    )
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_fluctuation_field_clt_variance():
    # iid Bernoulli(rho): Var X(f=1) = chi(rho) exactly
    rng = np.random.default_rng(1)
    rho, n = 0.3, 64
    vals = [
        fields.fluctuation_field((rng.random(n) < rho).astype(float), np.ones(n), rho)
        for _ in range(4000)
    ]
    v = np.var(vals)
    assert abs(v - chi(rho)) < 4 * chi(rho) * math.sqrt(2.0 / 4000)


def test_fourier_modes_k0_and_direct_sum():
    rng = np.random.default_rng(2)
    n = 16
    occ = (rng.random(n) < 0.5).astype(float)
    ff = fields.fourier_modes(occ, 0.5, 4, n, 1)
    assert ff.coefficient((0,)) == pytest.approx(
        (occ - 0.5).sum() / math.sqrt(n), abs=1e-12
    )
    # single particle at the origin on an empty lattice, direct sum oracle
    occ = np.zeros(n)
    occ[0] = 1.0
    rho = 0.2
    ff = fields.fourier_modes(occ, rho, 4, n, 1)
    for k in range(-4, 5):
        direct = sum(
            (occ[x] - rho) * np.exp(-2j * np.pi * k * x / n) for x in range(n)
        ) / math.sqrt(n)
        assert ff.coefficient((k,)) == pytest.approx(direct, abs=1e-12)


def test_parseval_full_set():
    rng = np.random.default_rng(3)
    for n, d in [(16, 1), (8, 2)]:
        occ = (rng.random(n**d) < 0.4).astype(float)
        full = fields.fourier_full(occ, 0.4, n, d)
        assert (np.abs(full) ** 2).sum() == pytest.approx(
            ((occ - 0.4) ** 2).sum(), abs=1e-10
        )


def test_hermitian_and_periodicity():
    rng = np.random.default_rng(4)
    n = 12
    occ = (rng.random(n) < 0.5).astype(float)
    ff = fields.fourier_modes(occ, 0.5, 5, n, 1)
    for k in range(1, 6):
        assert ff.coefficient((-k,)) == pytest.approx(
            np.conj(ff.coefficient((k,))), abs=1e-12
        )
    # periodicity k -> k + n via the full transform
    full = fields.fourier_full(occ, 0.5, n, 1)
    assert full[3] == pytest.approx(full[(3 + n) % n], abs=1e-14)


def test_cutoff_error():
    with pytest.raises(fields.CutoffError):
        fields.fourier_modes(np.zeros(8), 0.5, 4, 8, 1)


def test_sobolev_norm():
    kv = np.array([[2]])
    f = fields.FluctuationField(kv, np.array([3.0 + 0j]), 16, 1, 0.5)
    assert fields.sobolev_norm(f, 1.0) == pytest.approx(3.0 * math.sqrt(5.0))
    rng = np.random.default_rng(5)
    occ = (rng.random(16) < 0.5).astype(float)
    ff = fields.fourier_modes(occ, 0.5, 7, 16, 1)
    # m = 0 equals the plain mode norm; weights decrease with -m
    assert fields.sobolev_norm(ff, 0.0) == pytest.approx(
        float(np.linalg.norm(ff.coef))
    )
    assert fields.sobolev_norm(ff, -2.0) <= fields.sobolev_norm(ff, -1.0)


def test_observable_field_occupancy_reduction():
    rng = np.random.default_rng(6)
    n = 12
    occ = (rng.random(n) < 0.5).astype(np.uint8)
    f = rng.normal(size=n)
    rho = 0.37
    psi = fields.occupancy_observable(1)
    got = fields.observable_field(occ, psi, f, rho, n, 1)
    want = float((occ - rho) @ f) / n
    assert got == pytest.approx(want, abs=1e-12)


def test_observable_field_constant_psi():
    psi = fields.LocalObservable(1, 1, np.full(8, 3.3))
    occ = (np.random.default_rng(7).random(10) < 0.5).astype(np.uint8)
    got = fields.observable_field(occ, psi, np.ones(10), 0.4, 10, 1)
    assert got == pytest.approx(0.0, abs=1e-12)


def test_observable_field_pair_product():
    # psi = eta_0 eta_{+1} via table, against direct enumeration on n=6
    n = 6
    rng = np.random.default_rng(8)
    occ = (rng.random(n) < 0.5).astype(np.uint8)
    rho = 0.45
    table = np.zeros(8)
    for pat in range(8):
        center = (pat >> 1) & 1
        right = (pat >> 2) & 1
        table[pat] = center * right
    psi = fields.LocalObservable(1, 1, table)
    assert psi.mean_under_product(rho) == pytest.approx(rho * rho, abs=1e-14)
    f = rng.normal(size=n)
    got = fields.observable_field(occ, psi, f, rho, n, 1)
    want = sum(
        (occ[x] * occ[(x + 1) % n] - rho * rho) * f[x] for x in range(n)
    ) / n
    assert got == pytest.approx(want, abs=1e-12)


def test_block_kernels():
    p, q = fields.block_kernels(1, 8, 1)
    assert q[0] == 1.0 and q[1:].max() == 0.0
    p, q = fields.block_kernels(2, 8, 1)
    assert np.allclose(q[:3], [0.25, 0.5, 0.25])
    for ell in range(1, 4):
        _, q = fields.block_kernels(ell, 8, 1)
        assert q.sum() == pytest.approx(1.0, abs=1e-14)
        assert np.all(q[2 * ell - 1 :] == 0.0)


def test_block_average():
    n = 12
    occ = np.ones(n)
    rho = 0.3
    assert fields.block_average(occ, 4, 2, rho, n, 1) == pytest.approx(0.7, abs=1e-12)
    # ell = 1 reduces to the centered occupancy
    rng = np.random.default_rng(9)
    occ = (rng.random(n) < 0.5).astype(float)
    for x in range(n):
        assert fields.block_average(occ, x, 1, rho, n, 1) == pytest.approx(
            occ[x] - rho, abs=1e-12
        )


def test_block_average_variance():
    rng = np.random.default_rng(10)
    rho, n, ell = 0.4, 64, 3
    _, q = fields.block_kernels(ell, n, 1)
    target = chi(rho) * float((q**2).sum())
    vals = [
        fields.block_average_field((rng.random(n) < rho).astype(float), ell, rho, n, 1)[0]
        for _ in range(4000)
    ]
    v = float(np.var(vals))
    assert abs(v - target) < 5 * target * math.sqrt(2.0 / 4000)


def test_integrated_autocorr_time_ar1():
    # AR(1) with coefficient phi has tau_int = (1+phi)/(2(1-phi))
    rng = np.random.default_rng(11)
    phi = 0.8
    x = np.empty(200_000)
    x[0] = 0.0
    eps = rng.normal(size=x.size)
    for i in range(1, x.size):
        x[i] = phi * x[i - 1] + eps[i]
    tau = fields.integrated_autocorr_time(x)
    assert tau == pytest.approx((1 + phi) / (2 * (1 - phi)), rel=0.15)


def test_spectrum_estimate_on_synthetic_ou():
    # synthetic complex OU series with known stationary variance per mode
    p = ModelParams(1.0, 1.0, 0.0, 1, 16)
    from rdex.simulate import SampleStream

    rng = np.random.default_rng(12)
    kvecs = np.array([[1], [2]])
    S = 40_000
    lam_true = chi(rho_star(p))
    modes = np.empty((S, 2), dtype=complex)
    for j, theta in enumerate([-3.0, -8.0]):
        a = math.exp(theta * 0.05)
        inj = math.sqrt(lam_true * (1 - a * a) / 2.0)
        z = np.zeros(S, dtype=complex)
        z0 = (rng.normal() + 1j * rng.normal()) * math.sqrt(lam_true / 2)
        for t in range(S):
            z0 = a * z0 + inj * (rng.normal() + 1j * rng.normal())
            z[t] = z0
        modes[:, j] = z
    st = SampleStream(
        times=np.arange(S) * 0.05, mean_density=np.zeros(S), kvecs=kvecs,
        modes=modes, pattern_counts=None, configs=None,
        flips_per_site=np.zeros(16), events=0, replica=0, seed=0, params=p,
    )
    rows = fields.spectrum_estimate([st], zero_mode=False)
    for r in rows:
        assert abs(r.variance - lam_true) < 3.5 * r.stderr
        assert r.batches >= 30


def test_spectrum_estimate_warns_when_short():
    p = ModelParams(1.0, 1.0, 0.0, 1, 16)
    from rdex.simulate import SampleStream

    rng = np.random.default_rng(13)
    st = SampleStream(
        times=np.arange(20.0), mean_density=np.zeros(20),
        kvecs=np.array([[1]]),
        modes=(rng.normal(size=(20, 1)) + 1j * rng.normal(size=(20, 1))),
        pattern_counts=None, configs=None, flips_per_site=np.zeros(16),
        events=0, replica=0, seed=0, params=p,
    )
    with pytest.warns(UserWarning):
        fields.spectrum_estimate([st])
