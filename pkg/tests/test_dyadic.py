import numpy as np
import pytest

from wolffkit.dyadic import (Box, DyadicCube, ShiftedLattice, ancestors,
                             cube_containing, whitney_decompose)


def test_cube_containing_2d():
    # floor arithmetic: side 1/2 -> (0,1); the cube [0.25,0.5)x[0.5,0.75)
    # with index (1,2) is the generation -2 one
    assert cube_containing((0.3, 0.7), -1).index == (0, 1)
    q = cube_containing((0.3, 0.7), -2)
    assert q.index == (1, 2)
    assert q.side == 0.25
    assert q.contains((0.3, 0.7))
    assert np.allclose(q.corner, [0.25, 0.5])


def test_cube_containing_origin():
    assert cube_containing((0.0, 0.0), 0).index == (0, 0)


def test_cube_containing_negative():
    assert cube_containing((-0.1,), 0).index == (-1,)


def test_parent_child_roundtrip():
    rng = np.random.default_rng(3)
    for _ in range(50):
        gen = int(rng.integers(-8, 8))
        idx = tuple(int(v) for v in rng.integers(-100, 100, size=3))
        q = DyadicCube(gen, idx)
        for child in q.children():
            assert child.parent() == q
            assert child.side == q.side / 2


def test_side_exact():
    assert DyadicCube(5, (0,)).side == 32.0
    assert DyadicCube(-3, (1, 2)).side == 0.125


def test_partition_property():
    # cubes of one generation containing sampled points are disjoint or equal
    rng = np.random.default_rng(5)
    pts = rng.uniform(-4, 4, size=(60, 2))
    for gen in (-2, 0, 1):
        cubes = {cube_containing(x, gen) for x in pts}
        for a in cubes:
            for b in cubes:
                if a is b or a == b:
                    continue
                lo_a, lo_b = a.corner, b.corner
                overlap = np.all(np.maximum(lo_a, lo_b)
                                 < np.minimum(lo_a + a.side, lo_b + b.side))
                assert not overlap


def test_ancestors_chain():
    q = cube_containing((0.1, 0.1), 0)
    chain = ancestors(q, 2)
    assert [c.side for c in chain] == [1.0, 2.0, 4.0]
    assert ancestors(q, 0) == [q]


def test_ancestors_index_halving():
    q = DyadicCube(0, (3,))
    chain = ancestors(q, 2)
    assert [c.index for c in chain] == [(3,), (1,), (0,)]


def test_ancestors_rejects_finer():
    with pytest.raises(ValueError):
        ancestors(DyadicCube(0, (0,)), -1)


def test_whitney_unit_square():
    domain = Box((0.0, 0.0), (1.0, 1.0))
    cubes, dropped = whitney_decompose(domain, max_generation=-9)
    assert cubes
    n = 2
    for q in cubes:
        diam = q.side * np.sqrt(n)
        dist = domain.boundary_distance(q)
        assert 32.0 * diam <= dist <= 128.0 * diam


def test_whitney_disjoint_cover():
    domain = Box((0.0,), (1.0,))
    cubes, _ = whitney_decompose(domain, max_generation=-12)
    corners = sorted(q.corner[0] for q in cubes)
    sides = {round(np.log2(q.side)) for q in cubes}
    assert len(sides) > 2
    # disjointness: sorted intervals do not overlap
    cs = sorted((q.corner[0], q.corner[0] + q.side) for q in cubes)
    for (a0, a1), (b0, b1) in zip(cs, cs[1:]):
        assert a1 <= b0 + 1e-15


def test_whitney_count_grows_toward_endpoints():
    domain = Box((0.0,), (1.0,))
    cubes, _ = whitney_decompose(domain, max_generation=-8)
    by_gen = {}
    for q in cubes:
        by_gen[q.generation] = by_gen.get(q.generation, 0) + 1
    gens = sorted(by_gen)
    # each finer generation contributes cubes on both flanks
    assert all(by_gen[g] >= 2 for g in gens[:-1])
    _, dropped = whitney_decompose(domain, max_generation=-8)
    assert dropped > 0


def test_whitney_empty_domain():
    with pytest.raises(ValueError):
        Box((0.0,), (0.0,))


def test_shifted_lattice_consistency():
    rng = np.random.default_rng(9)
    lattice = ShiftedLattice((0.37, -1.21))
    for _ in range(30):
        x = rng.uniform(-3, 3, size=2)
        gen = int(rng.integers(-3, 3))
        q = lattice.cube_containing(x, gen)
        base = cube_containing(x - np.array(lattice.shift), gen)
        assert q == base
        lo = lattice.corner(q)
        assert np.all(x >= lo) and np.all(x < lo + q.side)


def test_index_overflow_guard():
    with pytest.raises(OverflowError):
        DyadicCube(0, (2 ** 53,))
    with pytest.raises(OverflowError):
        cube_containing((2.0 ** 60,), 0)
