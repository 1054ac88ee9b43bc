import math

import numpy as np
import pytest

from rdex.theory import (
    DomainError,
    ModelParams,
    F,
    F_prime,
    G,
    bernoulli,
    chi,
    constant,
    g_d,
    gaussian_entropy_sum,
    hoeffding_check,
    kappa,
    lambda_c_diagnostic,
    lambda_of_ksq,
    mft_rates,
    rho_star,
    spectrum,
    subgaussian_check,
    uniform,
    xi,
)


def P(a=1.0, b=1.0, lam=0.0, d=1, n=8):
    return ModelParams(a, b, lam, d, n)


def test_F_endpoints():
    p = P(a=1.5, b=0.7, lam=0.3)
    assert F(0.0, p) == 1.5
    assert F(1.0, p) == -0.7


def test_F_value():
    p = P(a=1.0, b=1.0, lam=0.5)
    assert math.isclose(F(0.5, p), 0.125, abs_tol=1e-15)


def test_F_domain():
    with pytest.raises(DomainError):
        F(1.5, P())


def test_G_values_and_identity():
    p = P(a=1.0, b=2.0, lam=0.0)
    assert G(0.0, p) == 1.0
    assert math.isclose(G(0.5, p), 1.5, abs_tol=1e-15)
    grid = np.linspace(0, 1, 101)
    for rho in grid:
        assert math.isclose(G(rho, p) - F(rho, p), 2 * p.b * rho, abs_tol=1e-14)


def test_rho_star_lambda_zero():
    assert math.isclose(rho_star(P(a=2.0, b=1.0)), 2.0 / 3.0, abs_tol=1e-13)
    assert math.isclose(rho_star(P(a=1.3, b=1.3)), 0.5, abs_tol=1e-13)


def test_rho_star_quadratic_case():
    got = rho_star(P(a=1.0, b=1.0, lam=0.5))
    assert math.isclose(got, (-3.0 + math.sqrt(17.0)) / 2.0, abs_tol=1e-12)


def test_rho_star_random_params():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        a = rng.uniform(0.1, 5.0)
        b = rng.uniform(0.1, 5.0)
        lam = rng.uniform(-0.9 * a, 5.0)
        p = ModelParams(a, b, lam, 1, 8)
        rs = rho_star(p)
        assert 0.0 < rs < 1.0
        assert abs(F(rs, p)) < 1e-13
        assert F_prime(rs, p) < 0.0


def test_kappa_limit_and_value():
    p = P()
    assert math.isclose(kappa(0.5, p), 1.0, abs_tol=1e-12)  # eps0 = 1
    assert math.isclose(kappa(0.5 + 1e-10, p), 1.0, abs_tol=1e-6)
    expected = 2 * 0.1875 * math.log(3.0) / 0.5
    assert math.isclose(kappa(0.25, p), expected, rel_tol=1e-12)


def test_kappa_symmetry_and_domain():
    p = P()
    for rho in (0.1, 0.3, 0.45):
        assert math.isclose(kappa(rho, p), kappa(1 - rho, p), rel_tol=1e-12)
    with pytest.raises(DomainError):
        kappa(0.0, p)


def test_kappa_continuity_in_lambda():
    # eps0 and kappa(rho) vary continuously as lam crosses 0
    vals = [kappa(0.3, P(lam=l)) for l in (-1e-6, 0.0, 1e-6)]
    assert abs(vals[0] - vals[1]) < 1e-5
    assert abs(vals[2] - vals[1]) < 1e-5


def test_g_d():
    assert g_d(10, 1) == 10.0
    assert math.isclose(g_d(10, 2), math.log(10.0))
    assert g_d(10, 3) == 1.0


def test_spectrum_lambda_zero_is_flat():
    p = P(a=1.2, b=0.8, lam=0.0)
    ch = chi(rho_star(p))
    for k in (0, 1, 5, 40):
        assert math.isclose(spectrum((k,), p).variance, ch, rel_tol=1e-14)


def test_spectrum_large_k_limit():
    p = P(a=1.0, b=1.0, lam=0.4)
    ch = chi(rho_star(p))
    lam_far = spectrum((10**6,), p).variance
    assert abs(lam_far - ch) < 1e-10


def test_spectrum_k0():
    p = P(a=1.0, b=1.0, lam=0.3)
    rs = rho_star(p)
    fp = F_prime(rs, p)
    expected = chi(rs) + (G(rs, p) + 2 * fp * chi(rs)) / (-2 * fp)
    assert math.isclose(spectrum((0,), p).variance, expected, rel_tol=1e-13)


def test_spectrum_depends_on_ksq_only():
    p = ModelParams(1.0, 2.0, 0.4, 2, 8)
    assert spectrum((3, 4), p).variance == spectrum((5, 0), p).variance


def test_spectrum_positive_random():
    rng = np.random.default_rng(1)
    for _ in range(200):
        a = rng.uniform(0.1, 4)
        b = rng.uniform(0.1, 4)
        lam = rng.uniform(-0.9 * a, 4)
        p = ModelParams(a, b, lam, 1, 8)
        k = int(rng.integers(0, 50))
        assert spectrum((k,), p).variance > 0


def test_deviation_sign_matches_lambda():
    # G(rho*) + 2 F'(rho*) chi(rho*) has the sign of lam
    a, b = 1.0, 1.0
    for lam in np.linspace(-0.9, 1.0, 21):
        if lam == 0:
            continue
        p = ModelParams(a, b, float(lam), 1, 8)
        rs = rho_star(p)
        dev = G(rs, p) + 2 * F_prime(rs, p) * chi(rs)
        assert math.copysign(1, dev) == math.copysign(1, lam)


def test_mft_rates():
    p = P(a=1.0, b=1.0, lam=1.0)
    A, B = mft_rates(0.5, p)
    assert math.isclose(A, 0.75) and math.isclose(B, 0.5)
    assert mft_rates(1.0, p)[0] == 0.0
    for rho in np.linspace(0, 1, 101):
        A, B = mft_rates(rho, p)
        assert math.isclose(A - B, F(rho, p), abs_tol=1e-14)
        assert math.isclose(A + B, G(rho, p), abs_tol=1e-14)


def test_xi():
    assert xi(1.0) == 0.0
    assert math.isclose(xi(math.e), 0.5 * (math.e - 2.0), rel_tol=1e-14)
    with pytest.raises(DomainError):
        xi(0.0)
    # xi(r) equals the Gaussian KL divergence KL(N(0,r) || N(0,1))
    rng = np.random.default_rng(2)
    for r in rng.uniform(0.2, 5.0, 5):
        kl = 0.5 * (r - 1.0 - math.log(r))
        assert math.isclose(xi(r), kl, rel_tol=1e-14)


def test_gaussian_entropy_sum_lambda_zero():
    p = P(lam=0.0)
    for K in (1, 5, 20):
        assert gaussian_entropy_sum(p, K) == 0.0


def test_gaussian_entropy_sum_cauchy_d1():
    p = ModelParams(1.0, 1.0, 0.2, 1, 8)
    s50 = gaussian_entropy_sum(p, 50)
    s100 = gaussian_entropy_sum(p, 100)
    s200 = gaussian_entropy_sum(p, 200)
    assert s200 - s100 < s100 - s50
    assert s200 - s100 > 0


def test_gaussian_entropy_shell_slope_d3():
    p = ModelParams(1.0, 1.0, 0.3, 3, 8)
    Ks = [4, 8, 16, 32]
    shells = [gaussian_entropy_sum(p, 2 * K) - gaussian_entropy_sum(p, K) for K in Ks]
    slope = np.polyfit(np.log(Ks), np.log(shells), 1)[0]
    assert abs(slope + 1.0) < 0.3


def test_hoeffding_bernoulli():
    rep = hoeffding_check(bernoulli(0.5), 1.0, samples=100_000, seed=0)
    assert rep.passed
    assert math.isclose(rep.estimate, math.log(math.cosh(0.5)), abs_tol=5e-3)
    assert rep.bound == 0.125


def test_hoeffding_constant():
    rep = hoeffding_check(constant(2.0), 3.0, samples=1000, seed=0)
    assert rep.passed and rep.estimate == 0.0


def test_hoeffding_uniform():
    rep = hoeffding_check(uniform(0.0, 1.0), 2.0, samples=200_000, seed=1)
    assert rep.passed
    closed = math.log((math.e**2 - 1.0) / 2.0) - 1.0
    assert math.isclose(rep.estimate, closed, abs_tol=5e-3)
    assert rep.bound == 0.5


def test_subgaussian():
    assert subgaussian_check(1.0, 0.0).passed
    rep = subgaussian_check(1.0, 0.25, samples=400_000, seed=2)
    assert rep.passed and math.isclose(rep.bound, math.sqrt(2.0), rel_tol=1e-12)
    rep = subgaussian_check(2.0, 0.2, samples=400_000, seed=3)
    assert rep.passed and math.isclose(rep.bound, math.sqrt(5.0), rel_tol=1e-12)
    with pytest.raises(DomainError):
        subgaussian_check(1.0, 0.5)


def test_lambda_c_diagnostic():
    rep = lambda_c_diagnostic(P(lam=0.01))
    assert rep["small"]
    rep = lambda_c_diagnostic(P(lam=5.0))
    assert not rep["small"]


def test_params_validation():
    with pytest.raises(DomainError):
        ModelParams(1.0, 1.0, -1.5, 1, 8)
    with pytest.raises(DomainError):
        ModelParams(-1.0, 1.0, 0.0, 1, 8)
    with pytest.raises(DomainError):
        ModelParams(1.0, 1.0, 0.0, 4, 8)
    assert P(a=1.0, b=2.0, lam=-0.5).eps0 == 0.5


def test_vectorized_lambda_matches_scalar():
    p = ModelParams(1.0, 1.5, 0.6, 1, 8)
    ks = np.arange(0, 9)
    vec = lambda_of_ksq(ks.astype(float) ** 2, p)
    for k, v in zip(ks, vec):
        assert math.isclose(v, spectrum((int(k),), p).variance, rel_tol=1e-14)
