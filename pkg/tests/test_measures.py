import math

import numpy as np
import pytest

from wolffkit.dyadic import DyadicCube
from wolffkit.measures import (CellDensityMeasure, PointMassMeasure,
                               RadialPowerMeasure, dirac, mass_ball,
                               mass_cube, measure_from_json, restrict,
                               sphere_area)


def unit_square_density(generation=-2, value=1.0):
    per = 2 ** (-generation)
    return CellDensityMeasure(DyadicCube(0, (0, 0)), generation,
                              np.full((per, per), value))


def test_mass_cube_point():
    d = dirac([0.0, 0.0])
    assert mass_cube(d, DyadicCube(0, (0, 0))) == 1.0
    # [0.5,1) x [0,0.5) does not contain the origin
    assert mass_cube(d, DyadicCube(-1, (1, 0))) == 0.0


def test_mass_cube_cells():
    f = unit_square_density()
    assert abs(mass_cube(f, DyadicCube(-1, (0, 0))) - 0.25) < 1e-15
    assert abs(mass_cube(f, DyadicCube(0, (0, 0))) - 1.0) < 1e-15
    # below cell resolution: density constant, mass = value * volume
    assert abs(mass_cube(f, DyadicCube(-4, (0, 0))) - 2.0 ** -8) < 1e-18


def test_mass_ball_point():
    d = dirac([0.0, 0.0])
    assert mass_ball(d, (1.0, 0.0), 0.5) == 0.0
    assert mass_ball(d, (1.0, 0.0), 1.5) == 1.0
    # closed ball: boundary atom counts
    assert mass_ball(d, (1.0, 0.0), 1.0) == 1.0


def test_mass_ball_radial_lebesgue():
    mu = RadialPowerMeasure(1.0, 0.0, math.inf, n=3)
    for t in (0.5, 1.0, 2.0):
        assert abs(mu.mass_ball((0, 0, 0), t) - 4 * math.pi / 3 * t ** 3) \
            < 1e-12 * t ** 3


def test_mass_ball_radial_gamma2():
    mu = RadialPowerMeasure(1.0, 2.0, math.inf, n=3)
    # integral_0^t r^-2 * 4 pi r^2 dr = 4 pi t
    assert abs(mu.mass_ball((0, 0, 0), 2.0) - 8 * math.pi) < 1e-10


def test_mass_ball_radial_off_center():
    mu = RadialPowerMeasure(1.0, 0.0, 1.0, n=3)
    # off-center query of the uniform ball against Monte Carlo
    rng = np.random.default_rng(2)
    pts = rng.uniform(-1, 1, size=(400000, 3))
    pts = pts[np.linalg.norm(pts, axis=1) <= 1.0]
    x = np.array([0.6, 0.0, 0.0])
    for t in (0.3, 0.8, 1.4):
        frac = np.mean(np.linalg.norm(pts - x, axis=1) <= t)
        mc = frac * 4 * math.pi / 3
        val = mu.mass_ball(x, t)
        assert abs(val - mc) < 0.02 * (mc + 0.1)


def test_radial_rejects_gamma_ge_n():
    with pytest.raises(ValueError, match="gamma < n"):
        RadialPowerMeasure(1.0, 3.0, 1.0, n=3)


def test_monotonicity_in_radius_and_cube():
    rng = np.random.default_rng(4)
    mu = PointMassMeasure(rng.uniform(-1, 1, size=(20, 2)),
                          rng.uniform(0, 1, size=20))
    x = (0.1, 0.2)
    ts = np.sort(rng.uniform(0, 3, size=20))
    vals = [mass_ball(mu, x, t) for t in ts]
    assert all(a <= b for a, b in zip(vals, vals[1:]))
    q = DyadicCube(-2, (0, 0))
    chain = [q]
    while chain[-1].generation < 2:
        chain.append(chain[-1].parent())
    masses = [mass_cube(mu, c) for c in chain]
    assert all(a <= b for a, b in zip(masses, masses[1:]))


def test_additivity_over_children():
    rng = np.random.default_rng(6)
    mu = PointMassMeasure(rng.uniform(0, 1, size=(30, 2)),
                          rng.uniform(0, 1, size=30))
    q = DyadicCube(0, (0, 0))
    total = sum(mass_cube(mu, c) for c in q.children())
    assert abs(total - mass_cube(mu, q)) < 1e-12

    f = unit_square_density(-3)
    total = sum(mass_cube(f, c) for c in q.children())
    assert abs(total - mass_cube(f, q)) < 1e-12


def test_restrict_point_measures():
    d = dirac([0.0, 0.0])
    r1 = restrict(d, ("ball", (0.0, 0.0), 1.0))
    assert r1.total_mass() == 1.0
    r2 = restrict(d, ("ball", (5.0, 0.0), 1.0))
    assert r2.total_mass() == 0.0


def test_restrict_cells_left_half():
    f = unit_square_density(-2)
    left = restrict(f, DyadicCube(-1, (0, 0)))
    assert abs(left.total_mass() - 0.25) < 1e-15
    halves = restrict(f, DyadicCube(-1, (0, 0))).total_mass() \
        + restrict(f, DyadicCube(-1, (0, 1))).total_mass()
    assert abs(halves - 0.5) < 1e-15


def test_restrict_below_resolution_errors():
    f = unit_square_density(-1)
    with pytest.raises(ValueError, match="below cell resolution"):
        restrict(f, DyadicCube(-3, (0, 0)))


def test_restrict_agreement_property():
    rng = np.random.default_rng(8)
    mu = PointMassMeasure(rng.uniform(-1, 1, size=(25, 2)),
                          rng.uniform(0, 1, size=25))
    e_center, e_rad = (0.2, -0.1), 0.8
    nu = restrict(mu, ("ball", e_center, e_rad))
    for _ in range(20):
        x = rng.uniform(-1, 1, size=2)
        t = rng.uniform(0, 2)
        d = np.linalg.norm(mu.positions - np.asarray(e_center), axis=1)
        dd = np.linalg.norm(mu.positions - x, axis=1)
        expected = mu.masses[(d <= e_rad) & (dd <= t)].sum()
        assert abs(nu.mass_ball(x, t) - expected) < 1e-12


def test_translation_invariance():
    rng = np.random.default_rng(10)
    pos = rng.uniform(-1, 1, size=(15, 3))
    mas = rng.uniform(0, 1, size=15)
    mu = PointMassMeasure(pos, mas)
    shift = np.array([0.7, -0.3, 1.1])
    nu = PointMassMeasure(pos + shift, mas)
    for _ in range(20):
        x = rng.uniform(-1, 1, size=3)
        t = rng.uniform(0, 2)
        assert mass_ball(mu, x, t) == mass_ball(nu, x + shift, t)


def test_cell_mass_identity():
    f = unit_square_density(-3, value=2.0)
    assert abs(f.total_mass() - f.values.sum() * f.cell_volume) == 0.0


def test_json_roundtrip():
    d = PointMassMeasure([[0.0, 1.0], [2.0, 3.0]], [1.0, 0.5])
    d2 = measure_from_json(d.to_json())
    assert np.array_equal(d2.positions, d.positions)
    assert np.array_equal(d2.masses, d.masses)

    f = unit_square_density(-1, 3.0)
    f2 = measure_from_json(f.to_json())
    assert np.array_equal(f2.values, f.values)

    r = RadialPowerMeasure(2.0, 1.0, 4.0, n=2)
    r2 = measure_from_json(r.to_json())
    assert r2.a == 2.0 and r2.gamma == 1.0 and r2.R == 4.0


def test_json_malformed():
    with pytest.raises(ValueError, match="type"):
        measure_from_json({})
    with pytest.raises(ValueError, match="atom"):
        measure_from_json({"type": "points", "atoms": [{"y": [0]}]})
    with pytest.raises(ValueError, match="unknown type"):
        measure_from_json({"type": "gaussian"})


def test_sphere_area():
    assert abs(sphere_area(2) - 2 * math.pi) < 1e-12
    assert abs(sphere_area(3) - 4 * math.pi) < 1e-12
