"""Concrete nonnegative measure families with ball and cube mass queries.

Three families cover every test in the toolkit: finite atomic measures,
piecewise-constant densities on the cells of a dyadic box, and radial power
densities a*|x|^(-gamma) on a ball.  Ball masses use closed balls, which
makes t -> mass_ball(mu, x, t) right-continuous and the step-function
integration in the potentials module well defined.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .dyadic import DyadicCube


def sphere_area(n):
    """Surface area of the unit sphere in R^n."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


class PointMassMeasure:
    """Finite sum of nonnegative point masses."""

    def __init__(self, positions, masses):
        positions = np.atleast_2d(np.asarray(positions, dtype=float))
        masses = np.asarray(masses, dtype=float).ravel()
        if positions.shape[0] != masses.shape[0]:
            raise ValueError("positions/masses length mismatch")
        if np.any(masses < 0):
            raise ValueError("masses must be nonnegative")
        self.positions = positions
        self.masses = masses

    @property
    def n(self):
        return self.positions.shape[1]

    def total_mass(self):
        return float(self.masses.sum())

    def support_radius(self, center):
        if len(self.masses) == 0:
            return 0.0
        d = np.linalg.norm(self.positions - np.asarray(center, float), axis=1)
        return float(d.max())

    def centroid(self):
        m = self.total_mass()
        if m == 0:
            return np.zeros(self.n)
        return (self.positions * self.masses[:, None]).sum(axis=0) / m

    def mass_ball(self, x, t):
        d = np.linalg.norm(self.positions - np.asarray(x, dtype=float), axis=1)
        return float(self.masses[d <= t].sum())

    def mass_cube(self, cube):
        lo = cube.corner
        hi = lo + cube.side
        inside = np.all((self.positions >= lo) & (self.positions < hi), axis=1)
        return float(self.masses[inside].sum())

    def mass_box(self, lo, hi):
        """Half-open axis box mass (supports shifted-lattice cubes)."""
        inside = np.all((self.positions >= np.asarray(lo))
                        & (self.positions < np.asarray(hi)), axis=1)
        return float(self.masses[inside].sum())

    def ball_profile(self, x):
        """Jump radii and cumulative masses of t -> mu(closed B_t(x))."""
        d = np.linalg.norm(self.positions - np.asarray(x, dtype=float), axis=1)
        order = np.argsort(d)
        return d[order], np.cumsum(self.masses[order])

    def scaled(self, factor):
        return PointMassMeasure(self.positions, self.masses * factor)

    def to_json(self):
        return {"type": "points",
                "atoms": [{"x": list(map(float, p)), "m": float(m)}
                          for p, m in zip(self.positions, self.masses)]}


def dirac(position, mass=1.0):
    return PointMassMeasure([position], [mass])


class CellDensityMeasure:
    """d mu = f dx with f constant on the generation-g cells of a dyadic box."""

    def __init__(self, box, generation, values):
        if generation > box.generation:
            raise ValueError("cell generation must be <= box generation")
        self.box = box
        self.generation = generation
        per_axis = 2 ** (box.generation - generation)
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values.reshape((per_axis,) * box.n)
        if values.shape != (per_axis,) * box.n:
            raise ValueError(f"values shape {values.shape} incompatible with "
                             f"{(per_axis,) * box.n}")
        if np.any(values < 0):
            raise ValueError("density values must be nonnegative")
        self.values = values
        self.per_axis = per_axis
        self._centers = None

    @property
    def n(self):
        return self.box.n

    @property
    def cell_side(self):
        return 2.0 ** self.generation

    @property
    def cell_volume(self):
        return 2.0 ** (self.generation * self.n)

    def cell_centers(self):
        """(N, n) array of cell centers, row-major cell order."""
        if self._centers is None:
            h = self.cell_side
            axes = [self.box.corner[j] + (np.arange(self.per_axis) + 0.5) * h
                    for j in range(self.n)]
            grids = np.meshgrid(*axes, indexing="ij")
            self._centers = np.stack([g.ravel() for g in grids], axis=1)
        return self._centers

    def total_mass(self):
        return float(self.values.sum() * self.cell_volume)

    def support_radius(self, center):
        c = self.cell_centers()
        d = np.linalg.norm(c - np.asarray(center, float), axis=1)
        return float(d.max() + 0.5 * self.cell_side * math.sqrt(self.n))

    def centroid(self):
        m = self.total_mass()
        if m == 0:
            return self.box.center
        w = self.values.ravel() * self.cell_volume
        return (self.cell_centers() * w[:, None]).sum(axis=0) / m

    def mass_cube(self, cube):
        """Exact mass of a dyadic cube (any generation; density is piecewise constant)."""
        g = self.generation
        if cube.generation >= g:
            # aggregate whole cells covered by cube, clipped to the box
            scale = 2 ** (cube.generation - g)
            lo = np.array([i * scale for i in cube.index])
            hi = lo + scale
            base = np.array([i * 2 ** (self.box.generation - g)
                             for i in self.box.index])
            lo = np.maximum(lo - base, 0)
            hi = np.minimum(hi - base, self.per_axis)
            if np.any(hi <= lo):
                return 0.0
            sl = tuple(slice(int(a), int(b)) for a, b in zip(lo, hi))
            return float(self.values[sl].sum() * self.cell_volume)
        # cube lies inside a single cell: constant density there
        parent = cube.ancestor(g)
        base = np.array([i * 2 ** (self.box.generation - g)
                         for i in self.box.index])
        rel = np.array(parent.index) - base
        if np.any(rel < 0) or np.any(rel >= self.per_axis):
            return 0.0
        return float(self.values[tuple(int(r) for r in rel)] * cube.volume)

    def mass_ball(self, x, t):
        """Center-rule approximation: full cells whose centers lie in the closed ball."""
        d = np.linalg.norm(self.cell_centers() - np.asarray(x, float), axis=1)
        return float(self.values.ravel()[d <= t].sum() * self.cell_volume)

    def mass_box(self, lo, hi):
        """Center-rule half-open box mass (shifted-lattice support)."""
        c = self.cell_centers()
        inside = np.all((c >= np.asarray(lo)) & (c < np.asarray(hi)), axis=1)
        return float(self.values.ravel()[inside].sum() * self.cell_volume)

    def ball_profile(self, x):
        d = np.linalg.norm(self.cell_centers() - np.asarray(x, float), axis=1)
        order = np.argsort(d)
        w = self.values.ravel()[order] * self.cell_volume
        return d[order], np.cumsum(w)

    def scaled(self, factor):
        return CellDensityMeasure(self.box, self.generation,
                                  self.values * factor)

    def to_json(self):
        return {"type": "cells",
                "box": {"generation": self.box.generation,
                        "index": list(self.box.index)},
                "generation": self.generation,
                "values": [float(v) for v in self.values.ravel()]}


class RadialPowerMeasure:
    """d mu = a * |x - center|^(-gamma) dx on the ball B_R(center).

    gamma < n is required for local integrability.  Origin-centered ball
    masses are closed-form; off-center queries integrate exact spherical-cap
    areas radially.
    """

    def __init__(self, a, gamma, R, center=None, n=None):
        if center is None:
            if n is None:
                raise ValueError("need center or dimension n")
            center = np.zeros(int(n))
        self.center = np.asarray(center, dtype=float)
        if a < 0:
            raise ValueError("amplitude must be nonnegative")
        if gamma >= self.n:
            raise ValueError(f"gamma < n required for local integrability "
                             f"(gamma={gamma}, n={self.n})")
        if R <= 0:
            raise ValueError("outer radius must be positive")
        self.a = float(a)
        self.gamma = float(gamma)
        self.R = float(R)

    @property
    def n(self):
        return len(self.center)

    def total_mass(self):
        return self.mass_ball(self.center, self.R)

    def support_radius(self, center):
        return float(np.linalg.norm(self.center - np.asarray(center, float))
                     + self.R)

    def centroid(self):
        return self.center.copy()

    def _centered_mass(self, t):
        n, g = self.n, self.gamma
        t = min(t, self.R)
        if t <= 0:
            return 0.0
        return self.a * sphere_area(n) * t ** (n - g) / (n - g)

    def _cap_fraction(self, cos_theta):
        """Fraction of the unit (n-1)-sphere within angle theta of a pole."""
        n = self.n
        c = np.clip(cos_theta, -1.0, 1.0)
        s2 = 1.0 - c * c
        half = 0.5 * special.betainc((n - 1) / 2.0, 0.5, s2)
        return np.where(c >= 0.0, half, 1.0 - half)

    def mass_ball(self, x, t):
        x = np.asarray(x, dtype=float)
        d = float(np.linalg.norm(x - self.center))
        if d == 0.0:
            return self._centered_mass(t)
        if t >= d + self.R:
            return self.total_mass()
        if t <= d - self.R:
            return 0.0
        # spheres of radius r < t - d are fully covered: closed form; the
        # partially covered shell integrates exact cap areas radially
        inner = self._centered_mass(t - d) if t > d else 0.0
        r_lo = abs(d - t)
        r_hi = min(d + t, self.R)
        if r_hi <= r_lo:
            return float(inner)
        nodes = 4096
        r = np.linspace(r_lo, r_hi, nodes + 1)
        r = 0.5 * (r[1:] + r[:-1])
        dr = (r_hi - r_lo) / nodes
        cos_theta = (d * d + r * r - t * t) / (2.0 * d * r)
        frac = self._cap_fraction(cos_theta)
        area = sphere_area(self.n) * r ** (self.n - 1)
        return float(inner + np.sum(self.a * r ** (-self.gamma) * area
                                    * frac * dr))

    def mass_cube(self, cube):
        """Midpoint quadrature over the cube (monotone helpers only need balls)."""
        # subdivide each axis; adequate for verifier-scale cubes
        m = 16
        h = cube.side / m
        axes = [cube.corner[j] + (np.arange(m) + 0.5) * h
                for j in range(self.n)]
        grids = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=1)
        r = np.linalg.norm(pts - self.center, axis=1)
        vals = np.where(r <= self.R, self.a * r ** (-self.gamma), 0.0)
        return float(vals.sum() * h ** self.n)

    def ball_profile(self, x):
        return None  # continuous mass profile; handled analytically

    def scaled(self, factor):
        return RadialPowerMeasure(self.a * factor, self.gamma, self.R,
                                  center=self.center)

    def to_json(self):
        return {"type": "radial_power", "a": self.a, "gamma": self.gamma,
                "R": self.R, "center": [float(c) for c in self.center]}


def mass_cube(mu, cube):
    return mu.mass_cube(cube)


def mass_ball(mu, x, t):
    if t < 0:
        raise ValueError("radius must be nonnegative")
    return mu.mass_ball(x, t)


def restrict(mu, region):
    """Restriction mu_E to a ball ("ball", center, radius) or dyadic cube.

    Exact for point masses; cell-granular (center rule for balls) for cell
    densities; radial-power measures restrict only to balls around their own
    center.
    """
    if isinstance(region, DyadicCube):
        if isinstance(mu, PointMassMeasure):
            lo = region.corner
            hi = lo + region.side
            inside = np.all((mu.positions >= lo) & (mu.positions < hi), axis=1)
            return PointMassMeasure(mu.positions[inside], mu.masses[inside])
        if isinstance(mu, CellDensityMeasure):
            if region.generation < mu.generation:
                raise ValueError("cube restriction below cell resolution")
            keep = np.zeros_like(mu.values, dtype=bool)
            scale = 2 ** (region.generation - mu.generation)
            base = np.array([i * 2 ** (mu.box.generation - mu.generation)
                             for i in mu.box.index])
            lo = np.array([i * scale for i in region.index]) - base
            hi = lo + scale
            lo = np.maximum(lo, 0)
            hi = np.minimum(hi, mu.per_axis)
            if np.all(hi > lo):
                keep[tuple(slice(int(a), int(b)) for a, b in zip(lo, hi))] = True
            return CellDensityMeasure(mu.box, mu.generation,
                                      np.where(keep, mu.values, 0.0))
        raise TypeError(f"cube restriction unsupported for {type(mu).__name__}")
    kind, center, radius = region
    if kind != "ball":
        raise ValueError(f"unknown region kind {kind!r}")
    center = np.asarray(center, dtype=float)
    if isinstance(mu, PointMassMeasure):
        d = np.linalg.norm(mu.positions - center, axis=1)
        inside = d <= radius
        return PointMassMeasure(mu.positions[inside], mu.masses[inside])
    if isinstance(mu, CellDensityMeasure):
        d = np.linalg.norm(mu.cell_centers() - center, axis=1)
        keep = (d <= radius).reshape(mu.values.shape)
        return CellDensityMeasure(mu.box, mu.generation,
                                  np.where(keep, mu.values, 0.0))
    if isinstance(mu, RadialPowerMeasure):
        if not np.allclose(center, mu.center):
            raise ValueError("radial-power restriction only to concentric balls")
        return RadialPowerMeasure(mu.a, mu.gamma, min(mu.R, radius),
                                  center=mu.center)
    raise TypeError(f"restrict unsupported for {type(mu).__name__}")


def measure_from_json(obj):
    """Decode a measure from the JSON schema (single external construction path)."""
    try:
        kind = obj["type"]
    except (TypeError, KeyError):
        raise ValueError("measure JSON: missing field 'type'")
    if kind == "points":
        atoms = obj.get("atoms", [])
        if not atoms:
            raise ValueError("measure JSON: 'atoms' must be nonempty")
        try:
            pos = [a["x"] for a in atoms]
            mas = [a["m"] for a in atoms]
        except (TypeError, KeyError) as e:
            raise ValueError(f"measure JSON: malformed atom entry ({e})")
        return PointMassMeasure(pos, mas)
    if kind == "cells":
        try:
            b = obj["box"]
            box = DyadicCube(int(b["generation"]), tuple(int(i) for i in b["index"]))
            return CellDensityMeasure(box, int(obj["generation"]), obj["values"])
        except (TypeError, KeyError) as e:
            raise ValueError(f"measure JSON: malformed 'cells' measure ({e})")
    if kind == "radial_power":
        try:
            return RadialPowerMeasure(obj["a"], obj["gamma"], obj["R"],
                                      center=obj.get("center"),
                                      n=obj.get("n"))
        except (TypeError, KeyError) as e:
            raise ValueError(f"measure JSON: malformed 'radial_power' measure ({e})")
    raise ValueError(f"measure JSON: unknown type {kind!r}")
