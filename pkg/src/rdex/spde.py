"""Spectral sampling and evolution of the limiting Gaussian field.

The stationary fluctuation field is centered Gaussian with independent mode
coefficients of variance lam_k; in Fourier space the dynamics is an
independent complex Ornstein-Uhlenbeck process per mode,

    dX_k = theta_k X_k dt + sigma_k dW,   theta_k = -4 pi^2 |k|^2 + F'(rho*),
    sigma_k^2 = 8 pi^2 |k|^2 chi(rho*) + G(rho*),

whose stationary variance sigma_k^2 / (-2 theta_k) equals lam_k identically
(asserted at import-time tolerance in tests).  Sampling respects the
real-field constraint: coefficients are generated on the lexicographically
positive half-space from pairs of standard normals and conjugated across k
-> -k, with the zero mode real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .theory import chi, F_prime, G, lambda_of_ksq, ModelParams, rho_star


def half_space_mask(kvecs: np.ndarray) -> np.ndarray:
    """True where the first nonzero component of k is positive."""
    out = np.zeros(len(kvecs), dtype=bool)
    for i, k in enumerate(kvecs):
        nz = k[k != 0]
        out[i] = len(nz) > 0 and nz[0] > 0
    return out


def cube_wavevectors(d: int, K: int) -> np.ndarray:
    rng = np.arange(-K, K + 1)
    grids = np.meshgrid(*([rng] * d), indexing="ij")
    return np.stack([g.reshape(-1) for g in grids], axis=1)


@dataclass
class GaussianFieldSample:
    """Complex mode coefficients with Hermitian symmetry on a cutoff cube."""

    kvecs: np.ndarray          # (m, d)
    coef: np.ndarray           # (m,) complex
    lam: np.ndarray            # (m,) target mode variances
    params: ModelParams

    def ksq(self) -> np.ndarray:
        return (self.kvecs.astype(float) ** 2).sum(axis=1)

    def coefficient(self, k) -> complex:
        k = np.atleast_1d(np.asarray(k, dtype=int))
        hit = np.all(self.kvecs == k, axis=1)
        if not hit.any():
            raise KeyError(f"wavevector {tuple(k)} outside the cutoff")
        return complex(self.coef[np.argmax(hit)])

    def pair_with(self, fhat: np.ndarray) -> float:
        """X(f) = sum_k fhat(k) X_k for a real test function's coefficients."""
        return float(np.real(np.sum(np.asarray(fhat) * self.coef)))


def _index_of(kvecs: np.ndarray) -> dict:
    return {tuple(int(c) for c in k): i for i, k in enumerate(kvecs)}


def theta_of_ksq(ksq, p: ModelParams) -> np.ndarray:
    return -4.0 * math.pi**2 * np.asarray(ksq, dtype=float) + F_prime(rho_star(p), p)


def noise_power_of_ksq(ksq, p: ModelParams) -> np.ndarray:
    """sigma_k^2 = 8 pi^2 |k|^2 chi + G at rho_star."""
    rs = rho_star(p)
    return 8.0 * math.pi**2 * np.asarray(ksq, dtype=float) * chi(rs) + G(rs, p)


def _conjugate_pairing(kvecs: np.ndarray) -> tuple:
    """(pos_idx, neg_idx, zero_idx) for the half-space construction."""
    index = _index_of(kvecs)
    pos = np.nonzero(half_space_mask(kvecs))[0]
    neg = np.array(
        [index[tuple(-int(c) for c in kvecs[i])] for i in pos], dtype=int
    )
    zero = index.get((0,) * kvecs.shape[1], -1)
    return pos, neg, zero


def _hermitian_noise(kvecs: np.ndarray, rng: np.random.Generator, count=None):
    """Unit-variance complex Gaussians with xi(-k) = conj(xi(k)), xi(0) real.

    count=None gives a vector (m,); otherwise a (count, m) batch.
    """
    m = len(kvecs)
    pos, neg, zero = _conjugate_pairing(kvecs)
    shape = (m,) if count is None else (count, m)
    z1 = rng.normal(size=shape)
    z2 = rng.normal(size=shape)
    xi = np.zeros(shape, dtype=complex)
    xi[..., pos] = (z1[..., pos] + 1j * z2[..., pos]) / math.sqrt(2.0)
    xi[..., neg] = np.conj(xi[..., pos])
    if zero >= 0:
        xi[..., zero] = z1[..., zero]
    return xi


def sample_stationary_batch(
    p: ModelParams, K: int, rng: np.random.Generator, count: int
) -> tuple:
    """(kvecs, lam, coef) with coef of shape (count, m): iid stationary draws."""
    kvecs = cube_wavevectors(p.d, K)
    lam = lambda_of_ksq((kvecs.astype(float) ** 2).sum(axis=1), p)
    xi = _hermitian_noise(kvecs, rng, count)
    return kvecs, lam, xi * np.sqrt(lam)


def ou_mode_trajectories(
    p: ModelParams, K: int, dt: float, steps: int, batch: int, rng: np.random.Generator
) -> tuple:
    """(kvecs, lam, traj) with traj (batch, steps+1, m): stationary chains.

    Each chain starts in the stationary law and applies the exact
    Ornstein-Uhlenbeck update `steps` times with spacing dt.
    """
    kvecs, lam, coef = sample_stationary_batch(p, K, rng, batch)
    ksq = (kvecs.astype(float) ** 2).sum(axis=1)
    decay = np.exp(theta_of_ksq(ksq, p) * dt)
    inj = np.sqrt(lam * (1.0 - decay**2))
    traj = np.empty((batch, steps + 1, len(kvecs)), dtype=complex)
    traj[:, 0] = coef
    for s in range(1, steps + 1):
        coef = coef * decay + _hermitian_noise(kvecs, rng, batch) * inj
        traj[:, s] = coef
    return kvecs, lam, traj


def sample_stationary(p: ModelParams, K: int, rng: np.random.Generator) -> GaussianFieldSample:
    """Draw the stationary field on the cube |k|_inf <= K."""
    kvecs = cube_wavevectors(p.d, K)
    lam = lambda_of_ksq((kvecs.astype(float) ** 2).sum(axis=1), p)
    xi = _hermitian_noise(kvecs, rng)
    return GaussianFieldSample(kvecs, xi * np.sqrt(lam), lam, p)


def evolve_ou(
    state: GaussianFieldSample, dt: float, rng: np.random.Generator
) -> GaussianFieldSample:
    """Exact Ornstein-Uhlenbeck update over a time step dt.

    Per mode: X <- exp(theta dt) X + noise with injected variance
    lam_k (1 - exp(2 theta dt)); preserves the stationary law and the
    Hermitian constraint.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    p = state.params
    ksq = state.ksq()
    decay = np.exp(theta_of_ksq(ksq, p) * dt)
    inj = state.lam * (1.0 - decay**2)
    xi = _hermitian_noise(state.kvecs, rng)
    coef = state.coef * decay + xi * np.sqrt(inj)
    return GaussianFieldSample(state.kvecs, coef, state.lam, p)


def decay_only(state: GaussianFieldSample, dt: float) -> GaussianFieldSample:
    """The noiseless half of the update: exact exponential mode decay."""
    decay = np.exp(theta_of_ksq(state.ksq(), state.params) * dt)
    return GaussianFieldSample(state.kvecs, state.coef * decay, state.lam, state.params)


@dataclass
class CovarianceRow:
    label: str
    empirical: float
    theory: float
    stderr: float
    z: float


def covariance_check(
    p: ModelParams, K: int, samples: int, rng: np.random.Generator, tests=None
) -> list:
    """Monte Carlo audit of E[X(f)^2] = sum_k |fhat(k)|^2 lam_k.

    tests: list of (label, fhat) with fhat indexed like the cutoff cube;
    defaults to a battery of low trig polynomials.
    """
    kvecs = cube_wavevectors(p.d, K)
    index = _index_of(kvecs)
    lam = lambda_of_ksq((kvecs.astype(float) ** 2).sum(axis=1), p)

    if tests is None:
        tests = []
        e1 = (1,) + (0,) * (p.d - 1)
        e1m = tuple(-c for c in e1)
        fhat = np.zeros(len(kvecs), dtype=complex)
        fhat[index[e1]] = 0.5
        fhat[index[e1m]] = 0.5
        tests.append(("cos(2 pi x1)", fhat))
        fhat = np.zeros(len(kvecs), dtype=complex)
        fhat[index[(0,) * p.d]] = 1.0
        tests.append(("constant", fhat))
        fhat = np.zeros(len(kvecs), dtype=complex)
        fhat[index[e1]] = 0.5 - 0.25j
        fhat[index[e1m]] = 0.5 + 0.25j
        k2 = (min(2, K),) + (0,) * (p.d - 1)
        fhat[index[k2]] = 0.3
        fhat[index[tuple(-c for c in k2)]] = 0.3
        tests.append(("mixed 3-mode", fhat))

    _, _, coef = sample_stationary_batch(p, K, rng, samples)
    draws = np.stack(
        [np.real(coef @ np.asarray(fhat)) for _, fhat in tests], axis=1
    )
    rows = []
    for j, (label, fhat) in enumerate(tests):
        theory = float((np.abs(fhat) ** 2 * lam).sum())
        v = draws[:, j]
        emp = float(v @ v / samples)
        se = float(np.std(v * v, ddof=1) / math.sqrt(samples))
        rows.append(
            CovarianceRow(label, emp, theory, se, (emp - theory) / se if se else math.nan)
        )
    return rows
