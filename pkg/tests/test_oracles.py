import math

import numpy as np
import pytest

from wolffkit.measures import (CellDensityMeasure, PointMassMeasure,
                               RadialPowerMeasure, dirac)
from wolffkit.dyadic import DyadicCube
from wolffkit.oracles import (brute_wolff, hessian_radial_residual, log_mesh,
                              plap_radial_residual, radial_hessian_solution,
                              radial_plap_solution, wolff_dirac_closed_form)
from wolffkit.params import RegimeError, make_params
from wolffkit.potentials import wolff_truncated


def test_plap_solution_325():
    c, expo = radial_plap_solution(make_params(3, 1, 2, 5))
    assert abs(c - 2.0 ** -0.5) < 1e-14
    assert expo == -0.5


def test_plap_solution_424():
    # c^3 = [p^(p-1)/(q-p+1)^p] [q(n-p) - n(p-1)] = (2/9)*4 = 8/9; direct
    # check: -Delta(c r^(-2/3)) = (8/9) c r^(-8/3) = c^4 r^(-8/3)
    c, expo = radial_plap_solution(make_params(4, 1, 2, 4))
    assert abs(c - (8.0 / 9.0) ** (1.0 / 3.0)) < 1e-14
    assert abs(expo + 2.0 / 3.0) < 1e-15


def test_plap_solution_regime_error():
    with pytest.raises(RegimeError, match="no singular solution"):
        radial_plap_solution(make_params(3, 1, 2, 3))   # q = q*


def test_hessian_solution_515():
    c, expo = radial_hessian_solution(5, 1, 5)
    assert abs(c - 1.25 ** 0.25) < 1e-14
    assert expo == -0.5


def test_hessian_solution_727():
    c, expo = radial_hessian_solution(7, 2, 7)
    # c'^(q-k) = [6!/(2! 5!)] n-k=5 -> (n-1)!/(k!(n-k)!) = 720/(2*120) = 3
    want = (3.0 * (4.0 ** 2 / 5.0 ** 3) * (7 * 3 - 14)) ** (1.0 / 5.0)
    assert abs(c - want) < 1e-14
    assert abs(expo + 4.0 / 5.0) < 1e-15


def test_hessian_solution_regime_error():
    with pytest.raises(RegimeError):
        radial_hessian_solution(5, 1, 5.0 / 3.0)
    with pytest.raises(RegimeError):
        radial_hessian_solution(4, 2, 10)


def test_plap_residual_closed_form():
    params = make_params(3, 1, 2, 5)
    c, expo = radial_plap_solution(params)
    mesh = log_mesh(0.5, 2.0, 400)
    u = c * mesh ** expo
    res = plap_radial_residual(u, params, mesh)
    scale = float(np.max(u ** params.q))
    assert res <= 1e-4 * scale


def test_plap_residual_convergence_order():
    params = make_params(4, 1, 2, 4)
    c, expo = radial_plap_solution(params)
    res = []
    for count in (400, 799):      # 799 points exactly halves the spacing
        mesh = log_mesh(0.5, 2.0, count)
        res.append(plap_radial_residual(c * mesh ** expo, params, mesh))
    assert 3.5 <= res[0] / res[1] <= 4.5


def test_plap_residual_zero_profile():
    params = make_params(3, 1, 2, 5)
    mesh = log_mesh(0.5, 2.0, 50)
    assert plap_radial_residual(np.zeros(50), params, mesh) == 0.0


def test_plap_residual_p_harmonic_annihilation():
    # u = c r^(-(n-p)/(p-1)) kills the divergence term, so the residual is
    # u^q up to the finite-difference error
    params = make_params(3, 1, 2.5, 5)
    n, p, q = params.n, params.p, params.q
    mesh = log_mesh(0.5, 2.0, 400)
    u = 1.3 * mesh ** (-(n - p) / (p - 1))
    res = plap_radial_residual(u, params, mesh)
    want = float(np.max((u ** q)[1:-1]))
    assert abs(res - want) < 1e-4 * want


def test_plap_residual_mesh_guards():
    params = make_params(3, 1, 2, 5)
    with pytest.raises(ValueError, match="at least 5"):
        plap_radial_residual(np.ones(4), params, log_mesh(0.5, 2.0, 4))
    with pytest.raises(ValueError, match="log-uniform"):
        plap_radial_residual(np.ones(6), params,
                             np.array([0.5, 0.6, 0.7, 0.8, 0.9, 1.0]))


def test_hessian_residual_closed_form():
    c, expo = radial_hessian_solution(5, 1, 5)
    mesh = log_mesh(0.5, 2.0, 400)
    u = c * mesh ** expo
    res = hessian_radial_residual(u, 5, 1, 5, mesh)
    scale = float(np.max(u ** 5))
    assert res <= 1e-4 * scale


def test_hessian_residual_727():
    c, expo = radial_hessian_solution(7, 2, 7)
    mesh = log_mesh(0.5, 2.0, 400)
    u = c * mesh ** expo
    res = hessian_radial_residual(u, 7, 2, 7, mesh)
    scale = float(np.max(u ** 7))
    assert res <= 1e-4 * scale


def test_hessian_k1_matches_plap_p2():
    rng = np.random.default_rng(0)
    mesh = log_mesh(0.5, 2.0, 200)
    params = make_params(5, 1, 2, 5)
    for _ in range(10):
        u = np.abs(rng.uniform(0.5, 2.0)) * mesh ** rng.uniform(-1.5, -0.2)
        a = hessian_radial_residual(u, 5, 1, 5, mesh)
        b = plap_radial_residual(u, params, mesh)
        assert abs(a - b) <= 1e-12 * max(a, 1e-300)


def test_hessian_residual_zero_profile():
    assert hessian_radial_residual(np.zeros(50), 5, 1, 5,
                                   log_mesh(0.5, 2.0, 50)) == 0.0


def test_dirac_closed_form_values():
    params = make_params(3, 1, 2, 5)
    assert abs(wolff_dirac_closed_form(params, 0.5, math.inf) - 2.0) < 1e-14
    assert wolff_dirac_closed_form(params, 0.5, 0.5) == 0.0
    assert wolff_dirac_closed_form(params, 0.5, 0.4) == 0.0


def test_dirac_closed_form_vs_implementation():
    rng = np.random.default_rng(1)
    for _ in range(100):
        n = int(rng.integers(2, 6))
        p = rng.uniform(1.2, 3.0)
        alpha = rng.uniform(0.2, (n - 0.05) / p)
        params = make_params(n, alpha, p, p + 0.5)
        dist = rng.uniform(0.05, 2.0)
        r = math.inf if rng.random() < 0.5 else dist * rng.uniform(1.0, 4.0)
        y = np.zeros(n)
        x = y.copy()
        x[0] = dist
        got = wolff_truncated(dirac(y), x, params, r)
        want = wolff_dirac_closed_form(params, dist, r)
        assert abs(got - want) <= 1e-12 * max(want, 1e-300)


def test_brute_wolff_dirac_convergence():
    params = make_params(3, 1, 2, 5)
    d = dirac([0, 0, 0])
    x = (0.5, 0, 0)
    want = 2.0
    got = brute_wolff(d, x, params, math.inf, nodes_per_decade=512)
    assert abs(got - want) <= 1e-3 * want


def test_brute_wolff_monotone_in_nodes():
    params = make_params(3, 1, 2, 5)
    rng = np.random.default_rng(2)
    mu = PointMassMeasure(rng.uniform(-1, 1, size=(6, 3)),
                          rng.uniform(0.1, 1, size=6))
    x = (0.1, 0.2, -0.1)
    exact = wolff_truncated(mu, x, params, 4.0)
    errs = [abs(brute_wolff(mu, x, params, 4.0, nodes_per_decade=k) - exact)
            for k in (16, 64, 256)]
    assert errs[0] >= errs[1] >= errs[2]


def test_brute_wolff_zero_measure():
    params = make_params(3, 1, 2, 5)
    mu = PointMassMeasure(np.zeros((1, 3)), [0.0])
    assert brute_wolff(mu, (1, 0, 0), params, 1.0) == 0.0


def test_brute_wolff_cells_cross_validation():
    params = make_params(2, 0.5, 2, 3)
    per = 16
    cells = CellDensityMeasure(DyadicCube(0, (0, 0)), -4,
                               np.ones((per, per)))
    x = (0.3, 0.6)
    fast = wolff_truncated(cells, x, params, 4.0)
    brute = brute_wolff(cells, x, params, 4.0, nodes_per_decade=256)
    assert abs(fast - brute) <= 0.02 * fast


def test_brute_wolff_node_guard():
    params = make_params(3, 1, 2, 5)
    with pytest.raises(ValueError):
        brute_wolff(dirac([0, 0, 0]), (1, 0, 0), params, 1.0,
                    nodes_per_decade=4)
