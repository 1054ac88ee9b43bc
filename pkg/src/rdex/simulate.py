"""Event-driven simulation of the reaction-diffusion exclusion chain.

Exchanges run at rate n^2 per unordered neighbor edge, single-site flips at
the configuration-dependent rate c_x; both are realized by thinning against
the static bound rate Lambda = n^2 d n^d + c_max n^d.  ``step`` performs one
literal transition of the uniformized chain (exponential waiting time
included) and is the reference implementation; ``run`` drives the compiled
kernels, which realize the same law but only materialize the configuration
at the sampling times.

Each replica owns a counter-based RNG stream (Philox keyed by (seed,
replica)) for the Poisson interval counts and initial condition, plus an
xorshift64* kernel stream derived from it, so results are bit-exact
reproducible given (seed, replica index) and independent of thread
scheduling.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .lattice import ParticleConfig, neighbor_table
from .theory import F_prime, ModelParams, rho_star


def reaction_rate(config: ParticleConfig, x: int, p: ModelParams) -> float:
    """c_x(eta) = (a + (lam/2d) * sum of 2d neighbor occupancies)(1-eta_x) + b eta_x."""
    occ = config.occ
    if occ[x] == 1:
        return p.b
    nbr = neighbor_table(config.n, config.d)
    s = int(occ[nbr[:, x]].sum())
    return p.a + (p.lam / (2 * p.d)) * s


def bound_rate(p: ModelParams) -> float:
    """Total thinning bound Lambda = n^2 * d * n^d + c_max * n^d."""
    size = p.n**p.d
    return float(p.n) ** 2 * p.d * size + p.c_max * size


def flip_probability(p: ModelParams) -> float:
    size = p.n**p.d
    return p.c_max * size / bound_rate(p)


def step(config: ParticleConfig, rng: np.random.Generator, p: ModelParams):
    """One transition of the uniformized chain.

    Returns (new_config, dt) with dt ~ Exp(Lambda).  Null events (rejected
    flip proposals, equal-occupancy exchanges) still advance time.
    """
    n, d = config.n, config.d
    size = n**d
    lam_tot = bound_rate(p)
    dt = rng.exponential(1.0 / lam_tot)
    out = config.copy()
    if rng.random() < 1.0 - flip_probability(p):
        e = int(rng.integers(d * size))
        axis, x = divmod(e, size)
        y = int(neighbor_table(n, d)[2 * axis, x])
        out.exchange(x, y)
    else:
        x = int(rng.integers(size))
        c = reaction_rate(config, x, p)
        if rng.random() * p.c_max < c:
            out.flip(x)
    return out, dt


def default_burn_in(p: ModelParams) -> float:
    """Ten macroscopic relaxation times, 10 / |F'(rho_star)|."""
    return 10.0 / abs(F_prime(rho_star(p), p))


@dataclass
class SimConfig:
    params: ModelParams
    seed: int
    total_time: float
    sample_interval: float
    burn_in: float | None = None
    replicas: int = 1
    kmax: int = 0
    box_radius: int | None = None
    record_configs: bool = False
    init: str | np.ndarray = "stationary"  # Bernoulli(rho*) or per-site probs
    threads: int = 1

    def __post_init__(self):
        if self.params.n < 3:
            raise ValueError("simulation requires n >= 3 (no degenerate torus)")
        if self.burn_in is None:
            self.burn_in = default_burn_in(self.params)
        # burn_in = 0 is admitted for transient experiments that compare the
        # evolving density profile against the deterministic solution.
        if not (self.total_time > 0 and self.sample_interval > 0 and self.burn_in >= 0):
            raise ValueError("sample_interval and total_time must be positive")
        if self.total_time <= self.burn_in:
            raise ValueError("total_time must exceed burn_in")
        if self.replicas < 1:
            raise ValueError("need at least one replica")

    @property
    def n_samples(self) -> int:
        return int(math.floor((self.total_time - self.burn_in) / self.sample_interval))

    def sample_times(self) -> np.ndarray:
        j = np.arange(1, self.n_samples + 1, dtype=float)
        return self.burn_in + j * self.sample_interval


@dataclass
class SampleStream:
    """Per-replica record of sampled observables on the configured grid."""

    times: np.ndarray
    mean_density: np.ndarray
    kvecs: np.ndarray                 # (m, d) int wavevectors, 1 <= |k|_inf <= kmax
    modes: np.ndarray                 # (S, m) complex mode coefficients
    pattern_counts: np.ndarray | None  # (S, 2^(2R+1)^d) per-sample box histograms
    configs: np.ndarray | None        # (S, n^d) uint8 when record_configs
    flips_per_site: np.ndarray
    events: int
    replica: int
    seed: int
    params: ModelParams


def mode_wavevectors(d: int, kmax: int) -> np.ndarray:
    """Wavevectors with 1 <= |k|_inf <= kmax, one per conjugate pair.

    d=1 gives k = 1..kmax; for d >= 2, the lexicographically positive half
    of the cube (first nonzero component positive).
    """
    if kmax < 1:
        return np.zeros((0, d), dtype=int)
    if d == 1:
        return np.arange(1, kmax + 1, dtype=int).reshape(-1, 1)
    rng = np.arange(-kmax, kmax + 1)
    grids = np.meshgrid(*([rng] * d), indexing="ij")
    ks = np.stack([g.reshape(-1) for g in grids], axis=1)
    keep = []
    for k in ks:
        nz = k[k != 0]
        if len(nz) and nz[0] > 0:
            keep.append(k)
    return np.array(keep, dtype=int)


def _phase_matrix(n: int, d: int, kvecs: np.ndarray) -> np.ndarray:
    """W[x, j] = exp(-2 pi i k_j . x / n) / n^{d/2} over linear site index x."""
    size = n**d
    sites = np.arange(size)
    coords = np.empty((size, d))
    stride = 1
    for axis in range(d):
        coords[:, axis] = (sites // stride) % n
        stride *= n
    phase = coords @ (kvecs.T.astype(float)) * (-2.0j * math.pi / n)
    return np.exp(phase) / math.sqrt(size)


def _box_offsets_linear(n: int, d: int, R: int) -> np.ndarray:
    """Linear-index shifts for the box pattern bits, axis 0 fastest."""
    from .lattice import Box

    offs = Box(R, d).offsets()
    return offs


def _pattern_ids(cfg_block: np.ndarray, n: int, d: int, R: int) -> np.ndarray:
    """(C, n^d) pattern id at every center for a block of configurations."""
    C = cfg_block.shape[0]
    lat = cfg_block.reshape((C,) + (n,) * d, order="F")
    offs = _box_offsets_linear(n, d, R)
    ids = np.zeros((C,) + (n,) * d, dtype=np.int32)
    for bit, off in enumerate(offs):
        rolled = lat
        for axis, o in enumerate(off):
            if o:
                rolled = np.roll(rolled, -int(o), axis=axis + 1)
        ids |= rolled.astype(np.int32) << bit
    return ids.reshape(C, n**d, order="F")


def _initial_occupancy(cfg: SimConfig, rng: np.random.Generator) -> np.ndarray:
    size = cfg.params.n ** cfg.params.d
    if isinstance(cfg.init, str):
        if cfg.init != "stationary":
            raise ValueError(f"unknown init {cfg.init!r}")
        probs = np.full(size, rho_star(cfg.params))
    else:
        probs = np.asarray(cfg.init, dtype=float).reshape(size)
        if probs.min() < 0 or probs.max() > 1:
            raise ValueError("initial occupation probabilities must be in [0,1]")
    return (rng.random(size) < probs).astype(np.uint8)


def _run_replica(cfg: SimConfig, replica: int) -> SampleStream:
    p = cfg.params
    n, d = p.n, p.d
    size = n**d
    master = np.random.Generator(
        np.random.Philox(key=np.array([cfg.seed, replica], dtype=np.uint64))
    )
    occ = _initial_occupancy(cfg, master)
    state = np.array([_kernels.splitmix64(int(master.integers(1 << 63)))], dtype=np.uint64)
    lam_tot = bound_rate(p)
    pflip = flip_probability(p)
    log1m = math.log1p(-pflip)
    # exchanges before the first flip proposal: geometric, like every later gap
    carry = np.array(
        [np.int64(math.log(1.0 - master.random()) / log1m)], dtype=np.int64
    )
    halflam = p.lam / (2 * d)
    nbr = neighbor_table(n, d)
    flips = np.zeros(size, dtype=np.int64)

    def advance(counts, out):
        if d == 1:
            _kernels.run_intervals_d1(
                occ, state, carry, counts, out, flips,
                log1m, p.a, p.b, halflam, p.c_max, n,
            )
        else:
            _kernels.run_intervals_general(
                occ, state, carry, counts, out, flips,
                log1m, p.a, p.b, halflam, p.c_max, nbr, d,
            )

    # burn-in: one long interval, snapshot discarded
    k_burn = np.array([master.poisson(lam_tot * cfg.burn_in)], dtype=np.int64)
    dump = np.empty((1, size), dtype=np.uint8)
    advance(k_burn, dump)
    flips[:] = 0

    S = cfg.n_samples
    counts = master.poisson(lam_tot * cfg.sample_interval, size=S).astype(np.int64)
    out_cfg = np.empty((S, size), dtype=np.uint8)
    advance(counts, out_cfg)

    rs = rho_star(p)
    kvecs = mode_wavevectors(d, cfg.kmax)
    modes = np.zeros((S, len(kvecs)), dtype=np.complex128)
    mean_density = np.empty(S)
    patt = None
    if cfg.box_radius is not None:
        n_pat = 1 << ((2 * cfg.box_radius + 1) ** d)
        patt = np.zeros((S, n_pat), dtype=np.int64)
    W = _phase_matrix(n, d, kvecs) if len(kvecs) else None
    chunk = max(1, (1 << 24) // max(size, 1))
    for lo in range(0, S, chunk):
        hi = min(S, lo + chunk)
        block = out_cfg[lo:hi].astype(np.float64)
        mean_density[lo:hi] = block.mean(axis=1)
        if W is not None:
            modes[lo:hi] = (block - rs) @ W
        if patt is not None:
            ids = _pattern_ids(out_cfg[lo:hi], n, d, cfg.box_radius)
            for j in range(lo, hi):
                patt[j] = np.bincount(ids[j - lo], minlength=patt.shape[1])

    return SampleStream(
        times=cfg.sample_times(),
        mean_density=mean_density,
        kvecs=kvecs,
        modes=modes,
        pattern_counts=patt,
        configs=out_cfg if cfg.record_configs else None,
        flips_per_site=flips,
        events=int(counts.sum() + k_burn[0]),
        replica=replica,
        seed=cfg.seed,
        params=p,
    )


def run(cfg: SimConfig) -> list:
    """Simulate all replicas; returns one SampleStream per replica."""
    if cfg.replicas == 1 or cfg.threads <= 1:
        return [_run_replica(cfg, r) for r in range(cfg.replicas)]
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        futures = [pool.submit(_run_replica, cfg, r) for r in range(cfg.replicas)]
        return [f.result() for f in futures]


def flip_acceptance_counts(
    config: ParticleConfig, p: ModelParams, proposals: int, seed: int = 0
):
    """Thinning audit on a frozen configuration.

    Proposes `proposals` flips at uniform sites without ever applying them
    and tallies acceptances per site; the acceptance fraction at site x must
    match c_x(eta)/c_max.  Returns (accepted_per_site, proposed_per_site,
    rates).
    """
    rng = np.random.default_rng(seed)
    size = config.site_count
    nbr = neighbor_table(config.n, config.d)
    occ = config.occ.astype(np.int64)
    rates = np.where(
        occ == 1, p.b, p.a + (p.lam / (2 * p.d)) * occ[nbr].sum(axis=0)
    )
    sites = rng.integers(size, size=proposals)
    accept = rng.random(proposals) * p.c_max < rates[sites]
    acc = np.bincount(sites[accept], minlength=size)
    prop = np.bincount(sites, minlength=size)
    return acc, prop, rates
