"""Exact linear algebra for tiny systems (at most 16 sites).

Configurations are encoded as integers: bit i of the state label is the
occupancy of the site with linear index i (the same encoding as
``lattice.ParticleConfig.to_state_index``).  The full generator is assembled
as a sparse matrix over all 2^{n^d} states, split into its exchange and
reaction parts, and everything downstream (stationary distribution, relative
entropy, carre du champ, entropy-production inequalities) is computed from
it without sampling.

Neighbor sums are taken over the 2d lattice *directions* rather than over
the set of distinct neighbor sites.  For n >= 3 the two agree; on the
degenerate 2-torus (where +e_i and -e_i coincide) the directional convention
keeps every algebraic identity (notably the adjoint identity for L*1)
n-independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .lattice import SizeError
from .theory import ModelParams, kappa, rho_star

MAX_SITES = 16
_DENSE_LIMIT = 4096


def _site_strides(n: int, d: int) -> list:
    return [n**axis for axis in range(d)]


def _directional_neighbors(n: int, d: int) -> np.ndarray:
    """(2d, n^d) array: rows 2i, 2i+1 give the +e_i / -e_i neighbor sites."""
    size = n**d
    sites = np.arange(size)
    out = np.empty((2 * d, size), dtype=np.int64)
    stride = 1
    for axis in range(d):
        coord = (sites // stride) % n
        out[2 * axis] = sites + ((coord + 1) % n - coord) * stride
        out[2 * axis + 1] = sites + ((coord - 1) % n - coord) * stride
        stride *= n
    return out


def _bits(n_states: int, n_sites: int) -> np.ndarray:
    states = np.arange(n_states, dtype=np.uint32)
    return ((states[:, None] >> np.arange(n_sites, dtype=np.uint32)[None, :]) & 1).astype(
        np.float64
    )


@dataclass
class GeneratorMatrix:
    """Exchange + reaction generator over the full configuration space."""

    params: ModelParams
    n_sites: int
    Q_ex: sp.csr_matrix
    Q_r: sp.csr_matrix
    bits: np.ndarray = field(repr=False)          # (S, N) 0/1 floats
    flip_rates: np.ndarray = field(repr=False)    # (S, N) c_x per state/site
    neighbors: np.ndarray = field(repr=False)     # (2d, N) directional sites

    @property
    def n_states(self) -> int:
        return 1 << self.n_sites

    @property
    def Q(self) -> sp.csr_matrix:
        return (self.Q_ex + self.Q_r).tocsr()

    def part(self, which: str) -> sp.csr_matrix:
        if which == "full":
            return self.Q
        if which == "exchange":
            return self.Q_ex
        if which == "reaction":
            return self.Q_r
        raise ValueError(f"unknown generator part {which!r}")

    def dense(self, which: str = "full") -> np.ndarray:
        if self.n_states > _DENSE_LIMIT:
            raise SizeError(
                f"{self.n_states} states is past the dense limit {_DENSE_LIMIT}"
            )
        return self.part(which).toarray()

    def apply(self, f: np.ndarray, which: str = "full") -> np.ndarray:
        """(L f)(eta) for a function f given as a vector over states."""
        return self.part(which) @ np.asarray(f, dtype=float)

    def row_sum_residual(self) -> float:
        return float(np.abs(self.Q @ np.ones(self.n_states)).max())


def flip_rate_table(p: ModelParams) -> tuple:
    """(bits, rates, neighbors): c_x for every (state, site) pair."""
    n_sites = p.n**p.d
    if n_sites > MAX_SITES:
        raise SizeError(f"exact solver capped at {MAX_SITES} sites, got {n_sites}")
    n_states = 1 << n_sites
    bits = _bits(n_states, n_sites)
    nbrs = _directional_neighbors(p.n, p.d)
    nbr_sum = bits[:, nbrs].sum(axis=1)  # (S, N): sum over the 2d directions
    rates = np.where(
        bits == 1.0, p.b, p.a + (p.lam / (2 * p.d)) * nbr_sum
    )
    return bits, rates, nbrs


def build_generator(p: ModelParams) -> GeneratorMatrix:
    """Assemble the sparse generator; irreducible whenever eps0 > 0."""
    n_sites = p.n**p.d
    if n_sites > MAX_SITES:
        raise SizeError(f"exact solver capped at {MAX_SITES} sites, got {n_sites}")
    n_states = 1 << n_sites
    states = np.arange(n_states, dtype=np.int64)
    bits, rates, nbrs = flip_rate_table(p)
    bits_i = bits.astype(np.int64)

    # exchange part: one unordered edge per (site, positive axis) pair
    rows, cols, vals = [], [], []
    rate_ex = float(p.n) ** 2
    for axis in range(p.d):
        y = nbrs[2 * axis]
        for x in range(n_sites):
            yx = int(y[x])
            differ = bits_i[:, x] != bits_i[:, yx]
            src = states[differ]
            dst = src ^ ((1 << x) | (1 << yx))
            rows.append(src)
            cols.append(dst)
            vals.append(np.full(src.shape, rate_ex))
    if rows:
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        vals = np.concatenate(vals)
    Q_ex = sp.coo_matrix((vals, (rows, cols)), shape=(n_states, n_states)).tocsr()
    Q_ex = Q_ex - sp.diags(np.asarray(Q_ex.sum(axis=1)).reshape(-1))

    # reaction part: flips at rate c_x
    rows, cols, vals = [], [], []
    for x in range(n_sites):
        dst = states ^ (1 << x)
        rows.append(states)
        cols.append(dst)
        vals.append(rates[:, x])
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals)
    Q_r = sp.coo_matrix((vals, (rows, cols)), shape=(n_states, n_states)).tocsr()
    Q_r = Q_r - sp.diags(np.asarray(Q_r.sum(axis=1)).reshape(-1))

    return GeneratorMatrix(p, n_sites, Q_ex, Q_r, bits, rates, nbrs)


def bernoulli_product(rho: float, n_sites: int) -> np.ndarray:
    """The product measure of density rho as a vector over state labels."""
    n_states = 1 << n_sites
    pop = _bits(n_states, n_sites).sum(axis=1)
    return rho**pop * (1.0 - rho) ** (n_sites - pop)


def stationary_distribution(gen: GeneratorMatrix) -> np.ndarray:
    """The unique pi with pi^T Q = 0, sum(pi) = 1; residual below 1e-12."""
    S = gen.n_states
    A = gen.Q.T.tolil()
    A[S - 1, :] = 1.0
    rhs = np.zeros(S)
    rhs[S - 1] = 1.0
    if S <= _DENSE_LIMIT:
        pi = scipy.linalg.solve(A.toarray(), rhs)
    else:
        pi = spla.spsolve(A.tocsr(), rhs)
    if not np.all(np.isfinite(pi)):
        raise RuntimeError("stationary solve failed; generator may be reducible")
    pi = np.where(np.abs(pi) < 1e-15, 0.0, pi)
    if pi.min() < -1e-12:
        raise RuntimeError("stationary solve produced negative mass")
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    residual = float(np.abs(pi @ gen.Q).max())
    if residual > 1e-12:
        raise RuntimeError(f"stationary residual {residual} too large")
    return pi


def total_variation(mu: np.ndarray, nu: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(mu) - np.asarray(nu)).sum())


def relative_entropy(mu: np.ndarray, nu: np.ndarray) -> float:
    """sum mu log(mu/nu); +inf when mu is not absolutely continuous wrt nu."""
    mu = np.asarray(mu, dtype=float)
    nu = np.asarray(nu, dtype=float)
    support = mu > 0
    if np.any(nu[support] <= 0.0):
        return math.inf
    return float(np.sum(mu[support] * np.log(mu[support] / nu[support])))


def adjoint_one(p: ModelParams, return_routes: bool = False):
    """L*1 as a vector over states, computed two independent ways.

    Route A applies the adjoint of the reaction part with respect to the
    product measure at rho_star (density-ratio formula); route B evaluates
    the closed form (lam / (2 d rho_star)) * sum over ordered neighbor pairs
    of centered occupancies.  The two must agree pointwise to 1e-12; this
    single identity couples the rates, the reference measure and the
    centering, which makes it the strongest cheap self-check in the package.
    """
    rs = rho_star(p)
    bits, rates, nbrs = flip_rate_table(p)
    n_sites = bits.shape[1]

    # route A: sum_x [ c_x(eta^x) nu(eta^x)/nu(eta) - c_x(eta) ]
    ratio = np.where(bits == 1.0, (1.0 - rs) / rs, rs / (1.0 - rs))
    nbr_sum = bits[:, nbrs].sum(axis=1)
    rates_flipped = np.where(
        bits == 1.0, p.a + (p.lam / (2 * p.d)) * nbr_sum, p.b
    )
    route_a = (rates_flipped * ratio - rates).sum(axis=1)

    # route B: (lam / 2 d rho*) * sum over ordered pairs of etabar products
    centered = bits - rs
    pair_sum = np.zeros(bits.shape[0])
    for axis in range(p.d):
        for sign in (0, 1):
            y = nbrs[2 * axis + sign]
            pair_sum += (centered * centered[:, y]).sum(axis=1)
    route_b = (p.lam / (2 * p.d * rs)) * pair_sum

    scale = max(1.0, float(np.abs(route_b).max()))
    mismatch = float(np.abs(route_a - route_b).max())
    if mismatch > 1e-12 * scale * n_sites:
        raise RuntimeError(
            f"adjoint identity violated: max pointwise mismatch {mismatch}"
        )
    if return_routes:
        return route_a, route_b
    return 0.5 * (route_a + route_b)


def carre_du_champ(
    gen: GeneratorMatrix, f: np.ndarray, which: str = "full"
) -> np.ndarray:
    """Gamma f = L(f^2) - 2 f L f for the selected generator part."""
    f = np.asarray(f, dtype=float)
    return gen.apply(f * f, which) - 2.0 * f * gen.apply(f, which)


def quillota_formula(gen: GeneratorMatrix, g_lattice: np.ndarray) -> np.ndarray:
    """Explicit carre du champ of the fluctuation field of a test function.

    For X(eta) = n^{-d/2} sum_x (eta_x - rho*) g(x/n), the carre du champ
    is (1/n^d) [ sum over unordered edges of n^2 (eta_y - eta_x)^2 (g_y - g_x)^2
    + sum_x c_x(eta) g_x^2 ].  Returned per state, for cross-checking against
    the algebraic definition.
    """
    p = gen.params
    g = np.asarray(g_lattice, dtype=float).reshape(-1)
    nd = float(p.n**p.d)
    out = np.zeros(gen.n_states)
    rate_ex = float(p.n) ** 2
    for axis in range(p.d):
        y = gen.neighbors[2 * axis]
        occ_diff_sq = (gen.bits[:, y] - gen.bits) ** 2
        g_diff_sq = (g[y] - g) ** 2
        out += rate_ex * occ_diff_sq @ g_diff_sq
    out += gen.flip_rates @ (g**2)
    return out / nd


def fluctuation_vector(gen: GeneratorMatrix, g_lattice: np.ndarray) -> np.ndarray:
    """X(eta) = n^{-d/2} sum_x (eta_x - rho*) g_x as a vector over states."""
    p = gen.params
    rs = rho_star(p)
    g = np.asarray(g_lattice, dtype=float).reshape(-1)
    return ((gen.bits - rs) @ g) / math.sqrt(float(p.n**p.d))


def entropy_inequality_check(
    h: np.ndarray, f: np.ndarray, gamma: float, nu: np.ndarray, slack: float = 1e-10
) -> bool:
    """int h f dnu <= (H(f; nu) + log int e^{gamma h} dnu) / gamma."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    h = np.asarray(h, float)
    f = np.asarray(f, float)
    nu = np.asarray(nu, float)
    lhs = float(np.sum(h * f * nu))
    ent = float(np.sum(np.where(f > 0, f * np.log(np.where(f > 0, f, 1.0)), 0.0) * nu))
    log_mgf = float(np.log(np.sum(np.exp(gamma * h) * nu)))
    rhs = (ent + log_mgf) / gamma
    return lhs <= rhs + slack


@dataclass
class LogSobolevReport:
    trials: int
    violations: int
    worst_ratio: float     # largest H / dirichlet ratio seen (lower bound on kappa)
    kappa_used: float

    @property
    def passed(self) -> bool:
        return self.violations == 0


def log_sobolev_check(
    p: ModelParams, trials: int = 1000, seed: int = 0, slack: float = 1e-10
) -> LogSobolevReport:
    """Randomized audit of H(f; nu_rho*) <= kappa(rho*) * int Gamma_r sqrt f dnu.

    Densities are sampled as exp of Gaussian fields over the state space with
    random roughness, plus a near-point-mass probe.  Reports the worst
    observed ratio, an empirical lower bound on the true constant.
    """
    gen = build_generator(p)
    rs = rho_star(p)
    nu = bernoulli_product(rs, gen.n_sites)
    kap = kappa(rs, p)
    rng = np.random.default_rng(seed)
    S = gen.n_states

    violations = 0
    worst = 0.0
    batch = 256
    done = 0
    while done < trials:
        m = min(batch, trials - done)
        sigma = rng.uniform(0.1, 4.0, size=(m, 1))
        f = np.exp(sigma * rng.normal(size=(m, S)))
        f /= (f * nu).sum(axis=1, keepdims=True)
        sq = np.sqrt(f)
        # Gamma_r sqrt(f) summed against nu, vectorized over the batch
        dirichlet = np.zeros(m)
        for x in range(gen.n_sites):
            flipped = np.arange(S) ^ (1 << x)
            grad = sq[:, flipped] - sq
            dirichlet += ((gen.flip_rates[:, x] * grad**2) * nu).sum(axis=1)
        ent = (np.where(f > 0, f * np.log(np.where(f > 0, f, 1.0)), 0.0) * nu).sum(
            axis=1
        )
        bad = ent > kap * dirichlet + slack
        violations += int(bad.sum())
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.where(dirichlet > 0, ent / dirichlet, 0.0)
        worst = max(worst, float(ratios.max()))
        done += m
    return LogSobolevReport(trials, violations, worst, kap)


@dataclass
class YauRow:
    t: float
    H: float
    dH: float
    dissipation: float   # - int Gamma sqrt(f_t) dnu
    source: float        # + int L*1 f_t dnu
    slack: float         # rhs - dH, must be >= -tol


@dataclass
class YauReport:
    rows: list
    H_ss: float
    H_limit: float
    limit_gap: float

    @property
    def passed(self) -> bool:
        return all(r.slack >= -1e-6 for r in self.rows) and self.limit_gap < 1e-8


def _expm_law(Qt_dense: np.ndarray, mu0: np.ndarray, t: float) -> np.ndarray:
    law = mu0 @ scipy.linalg.expm(Qt_dense * t)
    law = np.clip(law, 0.0, None)
    return law / law.sum()


def yau_inequality_check(
    p: ModelParams, t_grid, t_limit: float = 40.0, fd_tol: float = 1e-6
) -> YauReport:
    """Entropy-production inequality along the flow started from nu_rho*.

    Checks H'(t) <= - int Gamma sqrt(f_t) dnu + int L*1 f_t dnu at each grid
    time, with H'(t) from central differences refined until the Richardson
    error estimate is below fd_tol, and checks H(t) -> H(f_ss; nu) for large t.
    """
    gen = build_generator(p)
    if gen.n_states > _DENSE_LIMIT:
        raise SizeError("entropy-flow check needs a dense exponential (<= 12 sites)")
    rs = rho_star(p)
    nu = bernoulli_product(rs, gen.n_sites)
    Q = gen.dense()
    lstar1 = adjoint_one(p)

    def entropy_at(t: float) -> float:
        mu = _expm_law(Q, nu, t)
        return relative_entropy(mu, nu)

    rows = []
    for t in t_grid:
        mu = _expm_law(Q, nu, t)
        f = mu / nu
        sq = np.sqrt(f)
        gamma_sq = carre_du_champ(gen, sq, "full")
        dissipation = -float(np.sum(gamma_sq * nu))
        source = float(np.sum(lstar1 * mu))
        # central difference with Richardson refinement
        h = min(1e-3, 0.25 * t) if t > 0 else 1e-3
        prev = None
        dH = 0.0
        for _ in range(12):
            dH = (entropy_at(t + h) - entropy_at(max(t - h, 0.0))) / (
                (t + h) - max(t - h, 0.0)
            )
            if prev is not None and abs(dH - prev) / 3.0 < fd_tol:
                break
            prev = dH
            h /= 2.0
        rhs = dissipation + source
        rows.append(YauRow(t, entropy_at(t), dH, dissipation, source, rhs - dH))

    pi = stationary_distribution(gen)
    H_ss = relative_entropy(pi, nu)
    H_limit = entropy_at(t_limit)
    return YauReport(rows, H_ss, H_limit, abs(H_limit - H_ss))


def detailed_balance_gap(gen: GeneratorMatrix, pi: np.ndarray) -> float:
    """Largest relative violation of pi_s Q_st = pi_t Q_ts over state pairs.

    Zero (to rounding) iff the chain is reversible for its stationary law.
    Note the n=3, d=1 torus is degenerate: every adjacent site pair shares
    the same third site as their common other neighbor, and the chain is
    exactly reversible there even for lam != 0; n >= 4 shows the generic
    non-reversibility.
    """
    Q = gen.dense()
    flux = pi[:, None] * Q
    np.fill_diagonal(flux, 0.0)
    scale = flux.max()
    if scale == 0:
        return 0.0
    return float(np.abs(flux - flux.T).max() / scale)


def reversibility_cycle_gap(gen: GeneratorMatrix) -> float:
    """Largest relative Kolmogorov-cycle mismatch over flip-flip 4-cycles.

    Scans cycles s -> s^x -> s^{x,y} -> s^y -> s for neighboring sites x, y.
    A reversible chain has equal products of rates both ways around every
    cycle; the reaction part with lam != 0 does not, and the returned gap is
    positive.  For lam == 0 the gap vanishes identically.
    """
    S = gen.n_states
    best = 0.0
    rates = gen.flip_rates
    bits_idx = np.arange(S)
    for axis in range(gen.params.d):
        y_of = gen.neighbors[2 * axis]
        for x in range(gen.n_sites):
            y = int(y_of[x])
            if y == x:
                continue
            sx = bits_idx ^ (1 << x)
            sxy = sx ^ (1 << y)
            sy = bits_idx ^ (1 << y)
            fwd = (
                rates[bits_idx, x]
                * rates[sx, y]
                * rates[sxy, x]
                * rates[sy, y]
            )
            bwd = (
                rates[bits_idx, y]
                * rates[sy, x]
                * rates[sxy, y]
                * rates[sx, x]
            )
            gap = np.abs(fwd - bwd) / np.maximum(fwd, bwd)
            best = max(best, float(gap.max()))
    return best
