"""Fluctuation fields, lattice Fourier analysis, and spectrum estimation.

The density fluctuation field of a configuration pairs the centered
occupancies with a test function: X(eta, f) = n^{-d/2} sum_x (eta_x - rho*)
f(x/n).  Its Fourier coefficients X_hat(k) = n^{-d/2} sum_x (eta_x - rho*)
exp(-2 pi i k.x / n) carry the stationary spectrum; their empirical
variances are compared against the predicted per-mode variance lam_k with
batch-means error bars sized by the measured autocorrelation time.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .lattice import Box, SizeError
from .theory import ModelParams, chi, lambda_of_ksq, rho_star


class CutoffError(ValueError):
    """Mode cutoff too large for the lattice."""


def fluctuation_field(occ: np.ndarray, f_values: np.ndarray, rho: float) -> float:
    """n^{-d/2} sum_x (eta_x - rho) f(x/n), f sampled at the lattice points."""
    occ = np.asarray(occ, dtype=float).reshape(-1)
    f = np.asarray(f_values, dtype=float).reshape(-1)
    if occ.shape != f.shape:
        raise ValueError("test function must be sampled at every lattice site")
    return float((occ - rho) @ f / math.sqrt(occ.size))


@dataclass
class FluctuationField:
    """Mode coefficients of the fluctuation field on a cutoff set."""

    kvecs: np.ndarray      # (m, d) integer wavevectors
    coef: np.ndarray       # (m,) complex
    n: int
    d: int
    rho: float

    def ksq(self) -> np.ndarray:
        return (self.kvecs.astype(float) ** 2).sum(axis=1)

    def coefficient(self, k) -> complex:
        k = np.atleast_1d(np.asarray(k, dtype=int))
        hit = np.all(self.kvecs == k, axis=1)
        if not hit.any():
            raise KeyError(f"wavevector {tuple(k)} not in the cutoff set")
        return complex(self.coef[np.argmax(hit)])


def _lattice_view(occ: np.ndarray, n: int, d: int) -> np.ndarray:
    return np.asarray(occ, dtype=float).reshape((n,) * d, order="F")


def fourier_modes(occ: np.ndarray, rho: float, K: int, n: int, d: int) -> FluctuationField:
    """Fourier coefficients over the cube |k|_inf <= K, K < n/2."""
    if not K < n / 2:
        raise CutoffError(f"cutoff K={K} must satisfy K < n/2 = {n/2}")
    eta = _lattice_view(occ, n, d) - rho
    spec = np.fft.fftn(eta) / math.sqrt(n**d)
    rng = np.arange(-K, K + 1)
    grids = np.meshgrid(*([rng] * d), indexing="ij")
    kvecs = np.stack([g.reshape(-1) for g in grids], axis=1)
    coef = spec[tuple((kvecs[:, a] % n) for a in range(d))]
    return FluctuationField(kvecs, coef, n, d, rho)


def fourier_full(occ: np.ndarray, rho: float, n: int, d: int) -> np.ndarray:
    """Full DFT mode array (unshifted numpy layout), n^{-d/2} normalized."""
    eta = _lattice_view(occ, n, d) - rho
    return np.fft.fftn(eta) / math.sqrt(n**d)


def sobolev_norm(field: FluctuationField, m: float) -> float:
    """Weighted mode norm (sum |coef|^2 (1 + |k|^2)^m)^{1/2}.

    Computed over whatever mode set the field carries; truncation to a
    cutoff cube is the caller's (reported) choice.
    """
    w = (1.0 + field.ksq()) ** m
    return float(np.sqrt((np.abs(field.coef) ** 2 * w).sum()))


@dataclass
class LocalObservable:
    """A function of the occupancy pattern on the box B_R.

    table[i] is the value on the pattern whose bit k (in canonical box
    offset order) is occupancy at offset k.
    """

    R: int
    d: int
    table: np.ndarray

    def __post_init__(self):
        expected = 1 << (2 * self.R + 1) ** self.d
        self.table = np.asarray(self.table, dtype=float).reshape(expected)

    def mean_under_product(self, rho: float) -> float:
        """Exact mean under the Bernoulli(rho) product on the box."""
        size = (2 * self.R + 1) ** self.d
        ids = np.arange(1 << size, dtype=np.uint32)
        pop = np.zeros(ids.shape, dtype=np.int64)
        for bit in range(size):
            pop += (ids >> bit) & 1
        weights = rho**pop * (1.0 - rho) ** (size - pop)
        return float(self.table @ weights)


def occupancy_observable(d: int) -> LocalObservable:
    """psi(pattern) = occupancy at the box center, R = 0."""
    return LocalObservable(0, d, np.array([0.0, 1.0]))


def pattern_ids_all_centers(occ: np.ndarray, n: int, d: int, R: int) -> np.ndarray:
    """Pattern id of the radius-R box around every center (length n^d)."""
    if n <= 2 * R + 1:
        raise SizeError(f"box side {2 * R + 1} does not fit in torus of side {n}")
    lat = np.asarray(occ, dtype=np.int64).reshape((n,) * d, order="F")
    offs = Box(R, d).offsets()
    ids = np.zeros_like(lat)
    for bit, off in enumerate(offs):
        rolled = lat
        for axis, o in enumerate(off):
            if o:
                rolled = np.roll(rolled, -int(o), axis=axis)
        ids |= rolled << bit
    return ids.reshape(-1, order="F")


def observable_field(
    occ: np.ndarray, psi: LocalObservable, f_values: np.ndarray, rho: float, n: int, d: int
) -> float:
    """n^{-d} sum_x (psi(pattern at x) - <psi>_rho) f(x/n)."""
    ids = pattern_ids_all_centers(occ, n, d, psi.R)
    vals = psi.table[ids]
    f = np.asarray(f_values, dtype=float).reshape(-1)
    mean = psi.mean_under_product(rho)
    return float((vals - mean) @ f / n**d)


def block_kernels(ell: int, n: int, d: int) -> tuple:
    """(p, q): uniform kernel on the vertex cube of side ell and its
    self-convolution, both as flat arrays over the torus.

    q = p * p is supported on the cube of side 2*ell - 1 and sums to one.
    """
    if ell < 1:
        raise SizeError("block size ell must be >= 1")
    if not 2 * ell - 1 < n:
        raise SizeError(f"kernel support {2 * ell - 1} does not fit in torus {n}")
    line = np.zeros(n)
    line[:ell] = 1.0 / ell
    p = line
    for _ in range(d - 1):
        p = np.multiply.outer(line, p)
    p = p.reshape(-1, order="F")  # p[x] with axis-0-fastest linear index

    lat = p.reshape((n,) * d, order="F")
    q = np.fft.ifftn(np.fft.fftn(lat) ** 2).real
    q[np.abs(q) < 1e-15] = 0.0
    return p, q.reshape(-1, order="F")


def block_average_field(occ: np.ndarray, ell: int, rho: float, n: int, d: int) -> np.ndarray:
    """etabar^ell at every center: sum_y q(y) (eta_{x+y} - rho)."""
    _, q = block_kernels(ell, n, d)
    eta = _lattice_view(occ, n, d) - rho
    qlat = q.reshape((n,) * d, order="F")
    out = np.fft.ifftn(np.fft.fftn(eta) * np.conj(np.fft.fftn(qlat))).real
    return out.reshape(-1, order="F")


def block_average(occ: np.ndarray, x: int, ell: int, rho: float, n: int, d: int) -> float:
    """The q-kernel weighted centered average at one linear site index."""
    return float(block_average_field(occ, ell, rho, n, d)[x])


# ---------------------------------------------------------------------------
# spectrum estimation with autocorrelation-aware batch means


def integrated_autocorr_time(y: np.ndarray, c: float = 6.0) -> float:
    """Sokal-windowed integrated autocorrelation time, in sample units."""
    y = np.asarray(y, dtype=float)
    m = y.size
    y = y - y.mean()
    var = float(y @ y) / m
    if var == 0 or m < 8:
        return 0.5
    nfft = 1 << (2 * m - 1).bit_length()
    f = np.fft.rfft(y, nfft)
    acf = np.fft.irfft(f * np.conj(f))[:m].real
    acf /= acf[0]
    tau = 0.5
    for s in range(1, m):
        tau += acf[s]
        if s >= c * tau:
            break
    return max(tau, 0.5)


@dataclass
class SpectrumRow:
    kvec: tuple
    ksq: float
    variance: float
    stderr: float
    lam_theory: float
    z: float
    tau_int: float
    batches: int


def spectrum_estimate(
    streams: list, K: int | None = None, zero_mode: bool = True
) -> list:
    """Per-mode empirical variance with batch-means errors, against theory.

    streams: SampleStream list (independent replicas) sharing the same
    wavevector set.  The variance of mode k is Var X_hat(k) = E|X_hat|^2
    minus |mean|^2; the standard error comes from batch means with batch
    length >= 20 integrated autocorrelation times of the |X_hat(k)|^2
    series.  Warns when fewer than 30 batches survive.

    The k = 0 coefficient is synthesized from the recorded mean density,
    X_hat(0) = n^{d/2} (mean density - rho*); it carries the largest
    deviation of the spectrum from flatness and leads the whiteness test.
    """
    if not streams:
        raise ValueError("need at least one stream")
    p: ModelParams = streams[0].params
    kvecs = streams[0].kvecs
    mode_list = [tuple(int(c) for c in kv) for kv in kvecs]
    columns = list(range(len(mode_list)))
    if zero_mode:
        mode_list = [(0,) * p.d] + mode_list
        columns = [-1] + columns
    lam = lambda_of_ksq(
        np.array([float(sum(c * c for c in kv)) for kv in mode_list]), p
    )
    rs = rho_star(p)
    scale0 = math.sqrt(float(p.n**p.d))
    rows = []
    for j, (kv, col) in enumerate(zip(mode_list, columns)):
        kv = np.asarray(kv)
        if K is not None and np.abs(kv).max() > K:
            continue
        batch_means = []
        taus = []
        mean_parts = []
        for st in streams:
            if col < 0:
                z = scale0 * (st.mean_density - rs) + 0.0j
            else:
                z = st.modes[:, col]
            y = (z * np.conj(z)).real
            tau = integrated_autocorr_time(y)
            taus.append(tau)
            # at least one batch per replica, even for very short series
            L = min(max(1, int(math.ceil(20.0 * tau))), y.size)
            nb = y.size // L
            batch_means.extend(y[: nb * L].reshape(nb, L).mean(axis=1))
            mean_parts.append(z.mean())
        bm = np.asarray(batch_means)
        nb = bm.size
        if nb < 30:
            warnings.warn(
                f"only {nb} batches for mode {tuple(kv)}; error bars unreliable",
                stacklevel=2,
            )
        mean_mode = np.mean(mean_parts)
        var = float(bm.mean() - abs(mean_mode) ** 2)
        se = float(bm.std(ddof=1) / math.sqrt(nb)) if nb > 1 else math.inf
        rows.append(
            SpectrumRow(
                kvec=tuple(int(c) for c in kv),
                ksq=float((kv.astype(float) ** 2).sum()),
                variance=var,
                stderr=se,
                lam_theory=float(lam[j]),
                z=(var - float(lam[j])) / se if se > 0 else math.nan,
                tau_int=float(np.mean(taus)),
                batches=nb,
            )
        )
    return rows


def is_zero_mode(row: SpectrumRow) -> bool:
    return all(c == 0 for c in row.kvec)


def whiteness_z(rows: list, p: ModelParams) -> float:
    """Matched-filter aggregate z against the white-noise null.

    Tests H0: Var X_hat(k) = chi(rho*) for all k against the alternative
    profile lam_k, with inverse-variance weights w_k = (lam_k - chi)/se_k^2;
    this is the most powerful linear statistic for that alternative.  Under
    H0 the statistic is asymptotically standard normal.
    """
    ch = chi(rho_star(p))
    num = 0.0
    den = 0.0
    for r in rows:
        if r.stderr <= 0 or not math.isfinite(r.stderr):
            continue
        w = (r.lam_theory - ch) / r.stderr**2
        num += w * (r.variance - ch)
        den += (w * r.stderr) ** 2
    # at lam = 0 the alternative is itself flat and there is nothing to test
    return num / math.sqrt(den) if den > 0 else 0.0
