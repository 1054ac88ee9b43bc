"""Discrete flows transporting a point mass to the smoothing kernel.

A flow is an antisymmetric function on oriented nearest-neighbor edges,
stored as one value per unordered edge: phi[i, x] is the flow from site x to
x + e_i, and the value in the opposite orientation is its negative by
convention.  ``build_flow`` constructs a flow whose divergence is exactly
delta_0 - q_ell (q_ell the self-convolved block kernel), supported inside
the cube of side 2*ell - 1, by an axis-by-axis mass transport; the energy
sum phi^2 is the quantity whose growth in ell is audited against
g_d(ell) = ell, log(ell), 1.

``min_energy_flow`` solves the same divergence constraint by the
least-squares (gradient) route on the whole torus; it is the minimal-energy
flow among all flows with that divergence, reported for comparison only
(its support is not confined to the cube).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import SizeError
from .theory import g_d


@dataclass
class Flow:
    """phi[i, x] = flow from site x to site x + e_i (linear indices, axis-0
    fastest); antisymmetry is implicit in the storage convention."""

    phi: np.ndarray  # (d, n^d)
    n: int
    d: int
    ell: int

    def lattice(self) -> np.ndarray:
        return np.stack(
            [self.phi[i].reshape((self.n,) * self.d, order="F") for i in range(self.d)]
        )

    def divergence(self) -> np.ndarray:
        """div phi (x) = sum over neighbors y of phi(x, y), length n^d."""
        lat = self.lattice()
        out = np.zeros((self.n,) * self.d)
        for axis in range(self.d):
            out += lat[axis] - np.roll(lat[axis], 1, axis=axis)
        return out.reshape(-1, order="F")

    def energy(self) -> float:
        """sum over unordered edges of phi^2."""
        return float((self.phi**2).sum())

    def support_in_cube(self, side: int) -> bool:
        """True if every nonzero edge has both endpoints in {0..side-1}^d."""
        lat = self.lattice()
        for axis in range(self.d):
            nz = np.nonzero(lat[axis])
            for a in range(self.d):
                hi = side - 2 if a == axis else side - 1
                if len(nz[a]) and (nz[a].max() > hi):
                    return False
        return True


def _triangular(ell: int) -> np.ndarray:
    u = np.full(ell, 1.0 / ell)
    return np.convolve(u, u)


def delta_and_q(ell: int, n: int, d: int) -> tuple:
    """(delta_0, q_ell) as flat arrays over the torus."""
    t = _triangular(ell)
    L = t.size
    if L > n:
        raise SizeError(f"kernel support {L} does not fit in torus {n}")
    lat = np.zeros((n,) * d)
    block = t
    for _ in range(d - 1):
        block = np.multiply.outer(block, t)
    lat[(slice(0, L),) * d] = block
    delta = np.zeros((n,) * d)
    delta[(0,) * d] = 1.0
    return delta.reshape(-1, order="F"), lat.reshape(-1, order="F")


def build_flow(ell: int, n: int, d: int) -> Flow:
    """Axis-by-axis transport of the unit mass at 0 onto q_ell.

    Stage i moves, within each line parallel to axis i whose later
    coordinates are still 0, the mass w = prod of t over the earlier
    coordinates from position 0 to the triangular profile t.  The 1-D flow
    on such a line is phi(s, s+1) = w * (1 - T(s)) with T the cumulative
    distribution of t; it vanishes on the last in-cube edge boundary, so the
    support stays inside the cube of side 2*ell - 1.  The divergence
    telescopes exactly to delta_0 - q_ell.
    """
    if not 2 * ell - 1 < n / 2:
        raise SizeError(f"need 2*ell-1 < n/2, got ell={ell}, n={n}")
    t = _triangular(ell)
    L = t.size
    resid = 1.0 - np.cumsum(t)  # resid[s] = flow on edge s -> s+1, s = 0..L-2
    resid = np.where(np.abs(resid) < 1e-15, 0.0, resid)[: L - 1]

    phi = np.zeros((d,) + (n,) * d)
    for axis in range(d):
        if axis == 0:
            piece = resid
        else:
            block = t
            for _ in range(axis - 1):
                block = np.multiply.outer(block, t)
            piece = np.multiply.outer(block, resid)
        index = (slice(0, L),) * axis + (slice(0, L - 1),) + (0,) * (d - 1 - axis)
        phi[axis][index] = piece
    flat = np.stack([phi[i].reshape(-1, order="F") for i in range(d)])
    return Flow(flat, n, d, ell)


def min_energy_flow(ell: int, n: int, d: int) -> Flow:
    """Gradient (least-squares) flow with divergence delta_0 - q_ell.

    Solves the torus Poisson equation spectrally and takes edge differences
    of the potential; minimal energy among all flows with this divergence,
    but supported on the whole torus rather than the cube.
    """
    if not 2 * ell - 1 < n:
        raise SizeError(f"kernel support {2 * ell - 1} does not fit in torus {n}")
    delta, q = delta_and_q(ell, n, d)
    rhs = (q - delta).reshape((n,) * d, order="F")
    freq = np.fft.fftfreq(n)
    grids = np.meshgrid(*([freq] * d), indexing="ij")
    eig = -sum(4.0 * np.sin(math.pi * g) ** 2 for g in grids)
    spec = np.fft.fftn(rhs)
    with np.errstate(divide="ignore", invalid="ignore"):
        hspec = np.where(eig != 0, spec / eig, 0.0)
    h = np.fft.ifftn(hspec).real
    phi = np.zeros((d,) + (n,) * d)
    for axis in range(d):
        phi[axis] = h - np.roll(h, -1, axis=axis)
    flat = np.stack([phi[i].reshape(-1, order="F") for i in range(d)])
    return Flow(flat, n, d, ell)


def divergence_residual(flow: Flow) -> float:
    """Max absolute deviation of div phi from delta_0 - q_ell."""
    delta, q = delta_and_q(flow.ell, flow.n, flow.d)
    return float(np.abs(flow.divergence() - (delta - q)).max())


def divergence_formula_check(
    flow: Flow, p_dist: np.ndarray, q_dist: np.ndarray, g: np.ndarray, tol: float = 1e-10
) -> bool:
    """sum_x g(x)(p(x)-q(x)) == sum over unordered edges phi(x,y)(g(x)-g(y))."""
    g = np.asarray(g, dtype=float).reshape(-1)
    lhs = float(g @ (np.asarray(p_dist) - np.asarray(q_dist)))
    glat = g.reshape((flow.n,) * flow.d, order="F")
    lat = flow.lattice()
    rhs = 0.0
    for axis in range(flow.d):
        rhs += float((lat[axis] * (glat - np.roll(glat, -1, axis=axis))).sum())
    return abs(lhs - rhs) <= tol * max(1.0, abs(lhs), abs(rhs))


@dataclass
class EnergyRow:
    d: int
    ell: int
    energy: float
    energy_over_gd: float
    min_energy: float


@dataclass
class EnergyScalingReport:
    rows: list

    def ratio_max_min(self) -> float:
        vals = [r.energy_over_gd for r in self.rows if r.energy_over_gd > 0]
        return max(vals) / min(vals) if vals else math.inf


def energy_scaling(ell_grid, d: int, construction: str = "sweep") -> EnergyScalingReport:
    """Energies over an ell grid with the g_d(ell) normalization.

    The torus side is 4*ell + 2 per point, comfortably past the support
    guard, so energies depend on ell alone.
    """
    rows = []
    for ell in ell_grid:
        n = 4 * ell + 2
        fl = build_flow(ell, n, d) if construction == "sweep" else min_energy_flow(ell, n, d)
        ref = min_energy_flow(ell, n, d)
        rows.append(
            EnergyRow(d, ell, fl.energy(), fl.energy() / g_d(ell, d), ref.energy())
        )
    return EnergyScalingReport(rows)
