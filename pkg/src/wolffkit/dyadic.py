"""Dyadic cube arithmetic, shifted lattices, and Whitney decomposition.

A dyadic cube of generation i is 2^i * (k + [0,1)^n) for an integer vector
k; the half-open convention makes every point belong to exactly one cube
per generation.
"""

import math
from dataclasses import dataclass

import numpy as np

# double-precision floor is exact for |index| < 2^53
_INDEX_LIMIT = 2 ** 53


@dataclass(frozen=True)
class DyadicCube:
    generation: int
    index: tuple

    def __post_init__(self):
        if any(abs(i) >= _INDEX_LIMIT for i in self.index):
            raise OverflowError("dyadic index exceeds exact-arithmetic range 2^53")

    @property
    def n(self):
        return len(self.index)

    @property
    def side(self):
        return 2.0 ** self.generation

    @property
    def volume(self):
        return 2.0 ** (self.generation * self.n)

    @property
    def corner(self):
        return np.asarray(self.index, dtype=float) * self.side

    @property
    def center(self):
        return (np.asarray(self.index, dtype=float) + 0.5) * self.side

    def contains(self, x):
        """Half-open membership test."""
        x = np.asarray(x, dtype=float)
        lo = self.corner
        return bool(np.all(x >= lo) and np.all(x < lo + self.side))

    def parent(self):
        return DyadicCube(self.generation + 1,
                          tuple(i >> 1 for i in self.index))

    def children(self):
        """The 2^n children, in lexicographic corner order."""
        n = self.n
        base = tuple(2 * i for i in self.index)
        out = []
        for m in range(2 ** n):
            off = tuple((m >> (n - 1 - j)) & 1 for j in range(n))
            out.append(DyadicCube(self.generation - 1,
                                  tuple(b + o for b, o in zip(base, off))))
        return out

    def ancestor(self, generation):
        """The unique cube of the given coarser generation containing self."""
        if generation < self.generation:
            raise ValueError("ancestor generation must be >= cube generation")
        shift = generation - self.generation
        return DyadicCube(generation, tuple(i >> shift for i in self.index))


def cube_containing(x, generation, n=None):
    """The unique generation-``generation`` cube containing x."""
    x = np.asarray(x, dtype=float)
    if n is not None and x.shape != (n,):
        raise ValueError(f"point has dimension {x.shape}, expected {n}")
    scaled = np.floor(x * 2.0 ** (-generation))
    if np.any(np.abs(scaled) >= _INDEX_LIMIT):
        raise OverflowError("point outside exact dyadic index range")
    return DyadicCube(generation, tuple(int(v) for v in scaled))


def ancestors(cube, up_to_generation):
    """Chain cube = Q_0 subset Q_1 subset ... ordered by increasing generation."""
    if up_to_generation < cube.generation:
        raise ValueError("up_to_generation must be >= cube.generation")
    chain = [cube]
    while chain[-1].generation < up_to_generation:
        chain.append(chain[-1].parent())
    return chain


@dataclass(frozen=True)
class ShiftedLattice:
    """The lattice D + shift.  Cube lookup translates the query by -shift."""

    shift: tuple

    def cube_containing(self, x, generation):
        x = np.asarray(x, dtype=float)
        t = np.asarray(self.shift, dtype=float)
        return cube_containing(x - t, generation)

    def corner(self, cube):
        """Actual (shifted) lower corner of a lattice cube."""
        return cube.corner + np.asarray(self.shift, dtype=float)


@dataclass(frozen=True)
class Box:
    """Axis-aligned box given by per-coordinate (lo, hi) bounds."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise ValueError("lo/hi dimension mismatch")
        if any(h <= l for l, h in zip(self.lo, self.hi)):
            raise ValueError("empty box")

    @property
    def n(self):
        return len(self.lo)

    def contains_cube(self, cube):
        c = cube.corner
        s = cube.side
        return bool(np.all(c >= np.asarray(self.lo))
                    and np.all(c + s <= np.asarray(self.hi)))

    def intersects_cube(self, cube):
        c = cube.corner
        s = cube.side
        return bool(np.all(c < np.asarray(self.hi))
                    and np.all(c + s > np.asarray(self.lo)))

    def boundary_distance(self, cube):
        """Euclidean distance from the cube to the box boundary (0 if it pokes out)."""
        c = cube.corner
        s = cube.side
        d = min(min(c[i] - self.lo[i], self.hi[i] - (c[i] + s))
                for i in range(self.n))
        return max(d, 0.0)


def whitney_decompose(domain, max_generation):
    """Whitney decomposition of an axis-aligned box into dyadic cubes.

    Accepts a cube Q when 2^5 * diam(Q) <= dist(Q, boundary) and Q's parent
    fails that test, which forces the two-sided bound
    2^5 * diam(Q) <= dist(Q, bd) <= 2^7 * diam(Q).  Cubes that would need a
    generation below ``max_generation`` are dropped and returned separately.

    Returns (cubes, dropped_count).
    """
    if not isinstance(domain, Box):
        domain = Box(tuple(domain[0]), tuple(domain[1]))
    n = domain.n
    top = max(math.ceil(math.log2(domain.hi[i] - domain.lo[i]))
              for i in range(n))

    # seed cubes of generation `top` covering the domain; they always fail
    # the Whitney test (dist <= half-diameter of the domain < 32*diam(Q))
    lo_idx = [math.floor(domain.lo[i] / 2.0 ** top) for i in range(n)]
    hi_idx = [math.ceil(domain.hi[i] / 2.0 ** top) for i in range(n)]
    seeds = []
    ranges = [range(lo_idx[i], hi_idx[i]) for i in range(n)]
    idx = [r.start for r in ranges]
    while True:
        seeds.append(DyadicCube(top, tuple(idx)))
        j = n - 1
        while j >= 0:
            idx[j] += 1
            if idx[j] < ranges[j].stop:
                break
            idx[j] = ranges[j].start
            j -= 1
        if j < 0:
            break

    accepted = []
    dropped = 0
    stack = list(seeds)
    while stack:
        q = stack.pop()
        if not domain.intersects_cube(q):
            continue
        diam = q.side * math.sqrt(n)
        inside = domain.contains_cube(q)
        if inside and domain.boundary_distance(q) >= 32.0 * diam:
            accepted.append(q)
            continue
        if q.generation <= max_generation:
            dropped += 1
            continue
        stack.extend(q.children())
    return accepted, dropped
