"""Closed-form scalar functions of the model.

The single-site birth/death rate is c_x(eta) = (a + (lam/2d) * sum of the 2d
neighbor occupancies) * (1 - eta_x) + b * eta_x, on top of a nearest-neighbor
exclusion (stirring) dynamics sped up by n^2.  Everything here is a pure
function of the parameter tuple (a, b, lam, d, n):

* F(rho)  = (a + lam*rho)(1 - rho) - b*rho, the effective reaction drift;
  its unique root rho_star in (0,1) is the stationary bulk density.
* G(rho)  = (a + lam*rho)(1 - rho) + b*rho = F(rho) + 2*b*rho, the total
  reaction activity entering the fluctuation variance.
* chi(rho) = rho(1-rho), the static compressibility of a Bernoulli site.
* kappa(rho), the inverse log-Sobolev lower bound of the reaction part.
* g_d(n): n, log n, 1 for d = 1, 2, >=3 (Green's-function magnitude).
* spectrum(k): the stationary fluctuation variance per Fourier mode,
  lam_k = chi + (G + 2F'chi) / (8 pi^2 |k|^2 - 2F'), evaluated at rho_star.

Two algebraically equivalent forms of lam_k are evaluated and cross-checked
on every call; disagreement beyond 1e-12 relative raises, since it can only
mean a programming error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class DomainError(ValueError):
    """Argument outside the mathematical domain of a formula."""


class InconsistencyError(RuntimeError):
    """Two supposedly identical computation routes disagreed."""


@dataclass(frozen=True)
class ModelParams:
    """Parameter tuple (a, b, lam, d, n) with the standing positivity rules."""

    a: float
    b: float
    lam: float
    d: int
    n: int

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise DomainError("need a > 0 and b > 0")
        if not self.lam > -self.a:
            raise DomainError("need lam > -a (irreducibility)")
        if self.d not in (1, 2, 3):
            raise DomainError("dimension d must be 1, 2 or 3")
        # n = 2 is admitted solely for the exact solver's degenerate-torus
        # checks; the simulation paths require n >= 3.
        if self.n < 2:
            raise DomainError("side length n must be >= 2")

    @property
    def eps0(self) -> float:
        """min{a, a+lam, b} > 0, the uniform lower bound on the flip rates."""
        return min(self.a, self.a + self.lam, self.b)

    @property
    def c_max(self) -> float:
        """Uniform upper bound on the flip rates, max{a + max(lam,0), b}."""
        return max(self.a + max(self.lam, 0.0), self.b)

    @property
    def rho_star(self) -> float:
        return rho_star(self)

    @property
    def chi_star(self) -> float:
        return chi(self.rho_star)

    @property
    def fprime_star(self) -> float:
        return F_prime(self.rho_star, self)


def _check_rho(rho: float) -> None:
    if not 0.0 <= rho <= 1.0:
        raise DomainError(f"density must lie in [0, 1], got {rho}")


def F(rho: float, p: ModelParams) -> float:
    """(a + lam*rho)(1 - rho) - b*rho."""
    _check_rho(rho)
    return (p.a + p.lam * rho) * (1.0 - rho) - p.b * rho


def G(rho: float, p: ModelParams) -> float:
    """(a + lam*rho)(1 - rho) + b*rho."""
    _check_rho(rho)
    return (p.a + p.lam * rho) * (1.0 - rho) + p.b * rho


def F_prime(rho: float, p: ModelParams) -> float:
    """dF/drho = lam - a - b - 2*lam*rho."""
    _check_rho(rho)
    return p.lam - p.a - p.b - 2.0 * p.lam * rho


def chi(rho: float) -> float:
    """Mobility rho(1 - rho)."""
    return rho * (1.0 - rho)


@lru_cache(maxsize=None)
def rho_star(p: ModelParams) -> float:
    """The unique zero of F in (0, 1), by bisection to 1e-14 absolute.

    F(0) = a > 0 > -b = F(1), so the root exists; F is quadratic with a
    single sign change on [0,1], so it is unique and F'(rho_star) < 0.
    Bisection is preferred over the quadratic formula, which degenerates
    as lam -> 0.
    """
    lo, hi = 0.0, 1.0
    flo = F(lo, p)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = F(mid, p)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= 1e-14:
            break
    return 0.5 * (lo + hi)


def kappa(rho: float, p: ModelParams) -> float:
    """Inverse of the reaction log-Sobolev lower bound.

    kappa(rho) = 2 rho(1-rho) |log(rho/(1-rho))| / (eps0 |1-2rho|), with the
    removable singularity at rho = 1/2 replaced by its limit 1/eps0
    (switch at |1-2rho| < 1e-8).
    """
    if not 0.0 < rho < 1.0:
        raise DomainError("kappa requires rho in the open interval (0, 1)")
    if abs(1.0 - 2.0 * rho) < 1e-8:
        return 1.0 / p.eps0
    num = 2.0 * rho * (1.0 - rho) * abs(math.log(rho / (1.0 - rho)))
    return num / (p.eps0 * abs(1.0 - 2.0 * rho))


def g_d(n: float, d: int) -> float:
    """n for d=1, log n for d=2, 1 for d>=3."""
    if n < 1:
        raise DomainError("g_d needs n >= 1")
    if d == 1:
        return float(n)
    if d == 2:
        return math.log(n)
    return 1.0


def cal_A(u: float) -> float:
    """u(1 + u), the nonlinearity controlling the smallness condition."""
    if u < 0:
        raise DomainError("cal_A is defined for u >= 0")
    return u * (1.0 + u)


def lambda_c_diagnostic(p: ModelParams, c_const: float = 1.0) -> dict:
    """Smallness-condition diagnostic, never a hard gate.

    Checks c_const * kappa(rho_star) * cal_A(|lam| / (d rho_star)) < 1/2 and
    cal_A(|lam| / (d rho_star)) <= 1.  The true constant multiplying kappa is
    existential (dimension-dependent, not numerically pinned), so c_const is
    caller-supplied and the result is informational.
    """
    rs = rho_star(p)
    u = abs(p.lam) / (p.d * rs)
    lhs = c_const * kappa(rs, p) * cal_A(u)
    return {
        "lhs": lhs,
        "bound": 0.5,
        "small": bool(lhs < 0.5 and cal_A(u) <= 1.0),
        "cal_A": cal_A(u),
        "kappa": kappa(rs, p),
        "c_const": c_const,
    }


@dataclass(frozen=True)
class SpectrumPrediction:
    """Predicted stationary variance of one Fourier mode."""

    wavevector: tuple
    variance: float

    @property
    def ksq(self) -> float:
        return float(sum(k * k for k in self.wavevector))


def _lambda_k_two_ways(ksq: float, p: ModelParams) -> tuple:
    rs = rho_star(p)
    ch = chi(rs)
    g = G(rs, p)
    fp = F_prime(rs, p)
    q = 4.0 * math.pi**2 * ksq
    form_a = ch + (g + 2.0 * fp * ch) / (2.0 * q - 2.0 * fp)
    form_b = q * ch / (q - fp) + g / (2.0 * q - 2.0 * fp)
    return form_a, form_b


def spectrum(k, p: ModelParams) -> SpectrumPrediction:
    """Stationary mode variance lam_k at wavevector k (tuple of d integers).

    Evaluates both closed forms (white-noise-plus-massive-field split, and
    the time-integrated semigroup form); they must agree to 1e-12 relative.
    """
    k = tuple(int(ki) for ki in np.atleast_1d(k))
    if len(k) != p.d:
        raise DomainError(f"wavevector has {len(k)} components, expected d={p.d}")
    ksq = float(sum(ki * ki for ki in k))
    form_a, form_b = _lambda_k_two_ways(ksq, p)
    scale = max(abs(form_a), abs(form_b), 1e-300)
    if abs(form_a - form_b) > 1e-12 * scale:
        raise InconsistencyError(
            f"spectrum formulas disagree at k={k}: {form_a!r} vs {form_b!r}"
        )
    return SpectrumPrediction(k, 0.5 * (form_a + form_b))


def lambda_of_ksq(ksq, p: ModelParams) -> np.ndarray:
    """Vectorized lam_k as a function of |k|^2 (consistency-checked)."""
    ksq = np.asarray(ksq, dtype=float)
    rs = rho_star(p)
    ch = chi(rs)
    g = G(rs, p)
    fp = F_prime(rs, p)
    q = 4.0 * math.pi**2 * ksq
    form_a = ch + (g + 2.0 * fp * ch) / (2.0 * q - 2.0 * fp)
    form_b = q * ch / (q - fp) + g / (2.0 * q - 2.0 * fp)
    scale = np.maximum(np.maximum(np.abs(form_a), np.abs(form_b)), 1e-300)
    if np.any(np.abs(form_a - form_b) > 1e-12 * scale):
        raise InconsistencyError("spectrum formulas disagree on the ksq grid")
    return 0.5 * (form_a + form_b)


def mft_rates(rho: float, p: ModelParams) -> tuple:
    """Macroscopic creation/annihilation rates (A, B).

    A(rho) = (a + lam*rho)(1 - rho) is the mean rate at which empty sites
    fill, B(rho) = b*rho the mean rate at which occupied sites empty; by
    construction A - B = F and A + B = G.
    """
    _check_rho(rho)
    A = (p.a + p.lam * rho) * (1.0 - rho)
    B = p.b * rho
    return A, B


def xi(r: float) -> float:
    """(r - log r - 1)/2: the KL divergence of N(0, r) from N(0, 1)."""
    if r <= 0:
        raise DomainError("xi needs r > 0")
    return 0.5 * (r - math.log(r) - 1.0)


def gaussian_entropy_sum(p: ModelParams, K: int) -> float:
    """Partial sum of xi(lam_k / chi) over the cube |k|_inf <= K.

    The full sum is the relative entropy between the stationary Gaussian
    field and white noise of variance chi(rho_star); the terms decay like
    |k|^-4, so partial sums over growing cubes are Cauchy for d <= 3.
    At lam = 0 every term vanishes.
    """
    if K < 1:
        raise DomainError("cutoff K must be >= 1")
    ch = chi(rho_star(p))
    rng = np.arange(-K, K + 1)
    grids = np.meshgrid(*([rng] * p.d), indexing="ij")
    ksq = sum(g.astype(float) ** 2 for g in grids).reshape(-1)
    lam = lambda_of_ksq(ksq, p)
    r = lam / ch
    return float(np.sum(0.5 * (r - np.log(r) - 1.0)))


# ---------------------------------------------------------------------------
# bounded variables and the two concentration lemmas as statistical checks


@dataclass(frozen=True)
class BoundedDist:
    """A bounded scalar distribution for the moment-bound checks."""

    kind: str  # "bernoulli" | "uniform" | "constant"
    lo: float
    hi: float
    param: float = 0.0

    def mean(self) -> float:
        if self.kind == "bernoulli":
            return self.param
        if self.kind == "uniform":
            return 0.5 * (self.lo + self.hi)
        return self.lo

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "bernoulli":
            return (rng.random(size) < self.param).astype(float)
        if self.kind == "uniform":
            return rng.uniform(self.lo, self.hi, size)
        return np.full(size, self.lo)


def bernoulli(prob: float) -> BoundedDist:
    return BoundedDist("bernoulli", 0.0, 1.0, prob)


def uniform(lo: float, hi: float) -> BoundedDist:
    return BoundedDist("uniform", lo, hi)


def constant(c: float) -> BoundedDist:
    return BoundedDist("constant", c, c)


@dataclass
class CheckReport:
    passed: bool
    estimate: float
    bound: float
    stderr: float

    def __bool__(self) -> bool:
        return self.passed


def hoeffding_check(
    dist: BoundedDist, theta: float, samples: int = 200_000, seed: int = 0
) -> CheckReport:
    """Monte Carlo audit of the bounded-variable moment bound.

    Estimates log E[exp(theta (X - EX))] and checks it against
    (hi - lo)^2 theta^2 / 8 with three standard errors of slack (delta
    method for the log of the empirical mean).
    """
    rng = np.random.default_rng(seed)
    x = dist.sample(rng, samples) - dist.mean()
    w = np.exp(theta * x)
    m = float(w.mean())
    se_m = float(w.std(ddof=1) / math.sqrt(samples))
    est = math.log(m)
    se = se_m / m
    bound = (dist.hi - dist.lo) ** 2 * theta**2 / 8.0
    return CheckReport(est <= bound + 3.0 * se, est, bound, se)


def subgaussian_check(
    sigma2: float, gamma: float, samples: int = 200_000, seed: int = 0
) -> CheckReport:
    """Monte Carlo audit of E[exp(gamma X^2)] <= (1 - 2 sigma^2 gamma)^{-1/2}.

    A centered Gaussian of variance sigma^2 attains the bound with equality,
    so the check is that the estimate sits within three standard errors of
    (1 - 2 sigma^2 gamma)^{-1/2}.  Requires gamma < 1/(2 sigma^2).

    For 4 gamma sigma^2 > 1 the plain estimator has infinite variance, so
    the expectation is computed by importance sampling from a wider Gaussian
    N(0, s^2) with s^2 = max(sigma^2, 0.75 sigma^2/(1 - 2 gamma sigma^2)):
    the weights exp(gamma x^2) phi_sigma(x)/phi_s(x) are then bounded and the
    estimator is unbiased with finite variance for every admissible gamma.
    """
    if sigma2 <= 0:
        raise DomainError("sigma2 must be positive")
    if gamma >= 1.0 / (2.0 * sigma2):
        raise DomainError("need gamma < 1 / (2 sigma^2)")
    bound = (1.0 - 2.0 * sigma2 * gamma) ** -0.5
    if gamma == 0.0:
        return CheckReport(True, 1.0, bound, 0.0)
    rng = np.random.default_rng(seed)
    s2 = max(sigma2, 0.75 * sigma2 / (1.0 - 2.0 * gamma * sigma2))
    x = rng.normal(0.0, math.sqrt(s2), samples)
    log_w = (
        gamma * x * x
        - 0.5 * x * x * (1.0 / sigma2 - 1.0 / s2)
        + 0.5 * math.log(s2 / sigma2)
    )
    w = np.exp(log_w)
    est = float(w.mean())
    se = float(w.std(ddof=1) / math.sqrt(samples))
    return CheckReport(abs(est - bound) <= 3.0 * se, est, bound, se)
