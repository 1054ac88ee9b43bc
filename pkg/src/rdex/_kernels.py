"""JIT-compiled event loops for the continuous-time chain.

The chain is uniformized at the constant bound rate
Lambda = n^2 * (d n^d) + c_max * n^d.  Event times form a Poisson process of
rate Lambda, so the number of events in a sampling interval is Poisson and,
given the counts, the event types are iid: exchange with probability
n^2 d n^d / Lambda, flip proposal otherwise.  The kernels therefore take a
precomputed array of per-interval event counts, burn exchanges in runs whose
lengths are geometric (distance to the next flip proposal), and snapshot the
occupancy at every interval boundary.  Equal-occupancy exchanges and
rejected flip proposals are sampled and discarded, never excluded from the
rate, so the bound-rate bookkeeping is static.

The in-kernel generator is xorshift64*, seeded once per replica via
splitmix64; all floating draws use the top 53 bits.
"""

import math

import numpy as np
from numba import njit

_TO_F = 1.0 / 9007199254740992.0  # 2**-53


@njit(cache=True, inline="always")
def _next(s):
    s ^= s >> np.uint64(12)
    s ^= (s << np.uint64(25)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    s ^= s >> np.uint64(27)
    return s


@njit(cache=True, inline="always")
def _mix(s):
    return (s * np.uint64(2685821657736338717)) & np.uint64(0xFFFFFFFFFFFFFFFF)


def splitmix64(seed: int) -> int:
    """Expand a seed into a well-mixed nonzero 64-bit kernel state."""
    z = (int(seed) + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    z = z ^ (z >> 31)
    return z if z != 0 else 0x9E3779B97F4A7C15


@njit(cache=True, nogil=True)
def run_intervals_d1(
    occ, state, carry, counts, out_cfg, flip_counts, log1m_pflip, a, b, halflam, cmax, n
):
    """Advance a d=1 ring through len(counts) sampling intervals.

    occ: uint8 (n,) occupancy, modified in place.
    state: uint64 (1,) xorshift state; carry: int64 (1,) exchanges left
    before the next flip proposal (persists across calls).
    counts: int64 (S,) total events per interval.
    out_cfg: uint8 (S, n); row j receives the configuration at the end of
    interval j.  flip_counts: int64 (n,) accepted flips per site.
    """
    s = state[0]
    countdown = carry[0]
    for j in range(counts.shape[0]):
        K = counts[j]
        while K > 0:
            if countdown >= K:
                for _ in range(K):
                    s = _next(s)
                    r = _mix(s)
                    u = (r >> np.uint64(11)) * _TO_F
                    x = int(u * n)
                    y = x + 1
                    if y == n:
                        y = 0
                    t = occ[x]
                    occ[x] = occ[y]
                    occ[y] = t
                countdown -= K
                K = 0
            else:
                for _ in range(countdown):
                    s = _next(s)
                    r = _mix(s)
                    u = (r >> np.uint64(11)) * _TO_F
                    x = int(u * n)
                    y = x + 1
                    if y == n:
                        y = 0
                    t = occ[x]
                    occ[x] = occ[y]
                    occ[y] = t
                K -= countdown + 1
                s = _next(s)
                r = _mix(s)
                u = (r >> np.uint64(11)) * _TO_F
                x = int(u * n)
                xm = n - 1 if x == 0 else x - 1
                xp = 0 if x == n - 1 else x + 1
                if occ[x] == 1:
                    rate = b
                else:
                    rate = a + halflam * (occ[xm] + occ[xp])
                s = _next(s)
                r = _mix(s)
                u = (r >> np.uint64(11)) * _TO_F
                if u * cmax < rate:
                    occ[x] ^= 1
                    flip_counts[x] += 1
                s = _next(s)
                r = _mix(s)
                upos = ((r >> np.uint64(11)) + np.uint64(1)) * _TO_F
                countdown = np.int64(math.log(upos) / log1m_pflip)
        for i in range(n):
            out_cfg[j, i] = occ[i]
    state[0] = s
    carry[0] = countdown


@njit(cache=True, nogil=True)
def run_intervals_general(
    occ,
    state,
    carry,
    counts,
    out_cfg,
    flip_counts,
    log1m_pflip,
    a,
    b,
    halflam,
    cmax,
    nbr,
    d,
):
    """General-d variant; nbr is the (2d, n^d) directional neighbor table."""
    size = occ.shape[0]
    n_edges = d * size
    s = state[0]
    countdown = carry[0]
    for j in range(counts.shape[0]):
        K = counts[j]
        while K > 0:
            if countdown >= K:
                burn = K
            else:
                burn = countdown
            for _ in range(burn):
                s = _next(s)
                r = _mix(s)
                u = (r >> np.uint64(11)) * _TO_F
                e = int(u * n_edges)
                axis = e // size
                x = e - axis * size
                y = nbr[2 * axis, x]
                t = occ[x]
                occ[x] = occ[y]
                occ[y] = t
            if countdown >= K:
                countdown -= K
                K = 0
            else:
                K -= countdown + 1
                s = _next(s)
                r = _mix(s)
                u = (r >> np.uint64(11)) * _TO_F
                x = int(u * size)
                if occ[x] == 1:
                    rate = b
                else:
                    acc = 0.0
                    for row in range(2 * d):
                        acc += occ[nbr[row, x]]
                    rate = a + halflam * acc
                s = _next(s)
                r = _mix(s)
                u = (r >> np.uint64(11)) * _TO_F
                if u * cmax < rate:
                    occ[x] ^= 1
                    flip_counts[x] += 1
                s = _next(s)
                r = _mix(s)
                upos = ((r >> np.uint64(11)) + np.uint64(1)) * _TO_F
                countdown = np.int64(math.log(upos) / log1m_pflip)
        for i in range(size):
            out_cfg[j, i] = occ[i]
    state[0] = s
    carry[0] = countdown
