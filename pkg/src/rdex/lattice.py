"""Torus geometry and particle configurations.

Sites live on the d-dimensional discrete torus of side n.  The canonical
linearization puts axis 0 fastest: ``linear = x0 + n*x1 + n^2*x2``.  The same
encoding orders the bits of the integer state labels used by the exact
small-system solver, so a configuration, its snapshot on disk, and its row
index in a generator matrix all agree.

Snapshot byte layout (little-endian throughout):

    offset  size  field
    0       8     magic ``b"RDEXSNP1"``
    8       4     format version (currently 1), uint32
    12      4     dimension d, uint32
    16      4     side length n, uint32
    20      4     reserved (zero), uint32
    24      8     model time of the snapshot, float64
    32      8*W   occupancy bit-packed into W = ceil(n^d / 64) uint64 words;
                  site with linear index i sits in word i // 64, bit i % 64

A round trip through ``save_snapshot``/``load_snapshot`` is bit-exact.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

MAGIC = b"RDEXSNP1"
SNAPSHOT_VERSION = 1


class SizeError(ValueError):
    """A lattice/box/kernel size precondition was violated."""


def coords_to_linear(coords, n: int) -> int:
    """Linear index of a coordinate tuple, axis 0 fastest."""
    idx = 0
    for c in reversed(coords):
        idx = idx * n + (c % n)
    return idx


def linear_to_coords(idx: int, n: int, d: int) -> tuple:
    coords = []
    for _ in range(d):
        coords.append(idx % n)
        idx //= n
    return tuple(coords)


@dataclass(frozen=True)
class TorusIndex:
    """A site of the torus, carrying both coordinate and linear forms."""

    coords: tuple
    n: int

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(c % self.n for c in self.coords))

    @property
    def d(self) -> int:
        return len(self.coords)

    @property
    def linear(self) -> int:
        return coords_to_linear(self.coords, self.n)

    def shift(self, axis: int, step: int) -> "TorusIndex":
        c = list(self.coords)
        c[axis] = (c[axis] + step) % self.n
        return TorusIndex(tuple(c), self.n)

    def neighbors(self) -> list:
        """The 2d nearest neighbors under periodic boundary conditions."""
        out = []
        for axis in range(self.d):
            out.append(self.shift(axis, +1))
            out.append(self.shift(axis, -1))
        return out


def neighbors(x: TorusIndex) -> list:
    return x.neighbors()


def neighbor_table(n: int, d: int) -> np.ndarray:
    """Forward/backward neighbor linear indices for every site.

    Returns an int64 array of shape (2d, n^d); row 2*axis holds the +e_axis
    neighbor of each site, row 2*axis+1 the -e_axis neighbor.
    """
    size = n**d
    sites = np.arange(size)
    table = np.empty((2 * d, size), dtype=np.int64)
    stride = 1
    for axis in range(d):
        coord = (sites // stride) % n
        table[2 * axis] = sites + ((coord + 1) % n - coord) * stride
        table[2 * axis + 1] = sites + ((coord - 1) % n - coord) * stride
        stride *= n
    return table


class ParticleConfig:
    """Bit-valued occupancy over the n^d torus.

    Internally one uint8 per site (the simulation kernel swaps single sites
    millions of times per second; byte access beats packed-word bit fiddling).
    Packed 64-bit words are produced on demand for snapshots and for the
    integer state encoding shared with the exact solver.
    """

    __slots__ = ("n", "d", "occ")

    def __init__(self, n: int, d: int, occ=None):
        if n < 2:
            raise SizeError(f"side length n must be >= 2, got {n}")
        self.n = n
        self.d = d
        if occ is None:
            self.occ = np.zeros(n**d, dtype=np.uint8)
        else:
            occ = np.asarray(occ, dtype=np.uint8).reshape(n**d)
            if not np.all(occ <= 1):
                raise ValueError("occupancy values must be 0 or 1")
            self.occ = occ.copy()

    @property
    def site_count(self) -> int:
        return self.n**self.d

    def copy(self) -> "ParticleConfig":
        return ParticleConfig(self.n, self.d, self.occ)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ParticleConfig)
            and self.n == other.n
            and self.d == other.d
            and np.array_equal(self.occ, other.occ)
        )

    def particle_count(self) -> int:
        return int(self.occ.sum())

    def exchange(self, x: int, y: int) -> None:
        """Swap the occupancies of two linear site indices (involution)."""
        self.occ[x], self.occ[y] = self.occ[y], self.occ[x]

    def flip(self, x: int) -> None:
        """Toggle the occupancy at one linear site index (involution)."""
        self.occ[x] ^= 1

    def translate(self, x) -> "ParticleConfig":
        """tau_x: the translated configuration with (tau_x eta)_z = eta_{z+x}."""
        if isinstance(x, TorusIndex):
            x = x.coords
        arr = self.occ.reshape((self.n,) * self.d, order="F")
        out = arr
        for axis, step in enumerate(x):
            out = np.roll(out, -step, axis=axis)
        return ParticleConfig(self.n, self.d, out.reshape(-1, order="F"))

    # integer state encoding (exact-solver rows): bit i = occupancy of site i
    def to_state_index(self) -> int:
        bits = 0
        for i in np.nonzero(self.occ)[0]:
            bits |= 1 << int(i)
        return bits

    @classmethod
    def from_state_index(cls, state: int, n: int, d: int) -> "ParticleConfig":
        size = n**d
        occ = np.fromiter(((state >> i) & 1 for i in range(size)), dtype=np.uint8)
        return cls(n, d, occ)

    def pack_words(self) -> np.ndarray:
        """Occupancy packed into little-endian uint64 words."""
        size = self.site_count
        nwords = (size + 63) // 64
        padded = np.zeros(nwords * 64, dtype=np.uint8)
        padded[:size] = self.occ
        return np.packbits(padded, bitorder="little").view("<u8")

    @classmethod
    def from_words(cls, words: np.ndarray, n: int, d: int) -> "ParticleConfig":
        size = n**d
        bytes_ = np.asarray(words, dtype="<u8").view(np.uint8)
        bits = np.unpackbits(bytes_, bitorder="little")
        return cls(n, d, bits[:size])


@dataclass(frozen=True)
class Box:
    """The cube B_R = {x : |x_i| <= R} with (2R+1)^d sites."""

    radius: int
    d: int

    def __post_init__(self):
        if self.radius < 0:
            raise SizeError("box radius must be >= 0")

    @property
    def side(self) -> int:
        return 2 * self.radius + 1

    @property
    def site_count(self) -> int:
        return self.side**self.d

    def offsets(self) -> np.ndarray:
        """All offsets in B_R, axis 0 fastest, each coordinate in [-R, R]."""
        r = self.radius
        grids = np.meshgrid(*([np.arange(-r, r + 1)] * self.d), indexing="ij")
        # axis 0 fastest: offset index k enumerates coordinate 0 innermost
        cols = [g.reshape(-1, order="F") for g in grids]
        return np.stack(cols, axis=1)


def project_box(config: ParticleConfig, R: int, center) -> np.ndarray:
    """Read the occupancy pattern on the box of radius R around ``center``.

    pattern[k] = eta at site center + offset_k (mod n per axis), offsets in
    the canonical Box.offsets order.  Requires n > 2R+1 so the box injects
    into the torus through the universal cover.
    """
    n, d = config.n, config.d
    if n <= 2 * R + 1:
        raise SizeError(f"box side {2 * R + 1} does not fit in torus of side {n}")
    if isinstance(center, TorusIndex):
        center = center.coords
    box = Box(R, d)
    offs = box.offsets()
    arr = config.occ.reshape((n,) * d, order="F")
    idx = tuple((np.asarray(center[a]) + offs[:, a]) % n for a in range(d))
    return arr[idx].astype(np.uint8)


def pattern_index(pattern: np.ndarray) -> int:
    """Pack a box pattern into an integer, bit k = pattern[k]."""
    val = 0
    for k, bit in enumerate(np.asarray(pattern).reshape(-1)):
        val |= int(bit) << k
    return val


def save_snapshot(config: ParticleConfig, path, time: float = 0.0) -> None:
    header = MAGIC + struct.pack(
        "<IIIId", SNAPSHOT_VERSION, config.d, config.n, 0, float(time)
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(config.pack_words().tobytes())


def load_snapshot(path) -> tuple:
    """Returns (config, model_time)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:8] != MAGIC:
        raise ValueError("not a snapshot file (bad magic)")
    version, d, n, _reserved, time = struct.unpack("<IIIId", raw[8:32])
    if version != SNAPSHOT_VERSION:
        raise ValueError(f"unsupported snapshot version {version}")
    size = n**d
    nwords = (size + 63) // 64
    words = np.frombuffer(raw[32 : 32 + 8 * nwords], dtype="<u8")
    return ParticleConfig.from_words(words, n, d), time
