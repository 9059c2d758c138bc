import math

import numpy as np
import pytest

from wolffkit.params import (RegimeError, critical_exponents,
                             hessian_params, iteration_constants,
                             make_params, subadditivity_constant)


def test_make_params_basic():
    p = make_params(3, 1, 2, 5)
    assert p.p_prime == 2.0
    assert p.kind == "quasilinear"
    assert not p.local_only
    assert abs(p.p_prime * (p.p - 1) - p.p) < 1e-12 * p.p


def test_make_params_rejects_q():
    with pytest.raises(RegimeError, match="q <= p-1"):
        make_params(3, 1, 2, 0.5)


def test_make_params_rejects_p():
    with pytest.raises(RegimeError, match="p <= 1"):
        make_params(3, 1, 1.0, 2)


def test_alpha_p_equals_n_is_local_only():
    p = make_params(2, 1, 2, 3)
    assert p.local_only


def test_hessian_k1_reduces_to_laplacian():
    p = hessian_params(5, 1, 5)
    assert p.alpha == 1.0
    assert p.p == 2.0
    assert p.kind == "hessian"


def test_hessian_mapping_k2():
    p = hessian_params(7, 2, 5)
    assert abs(p.alpha - 4.0 / 3.0) < 1e-15
    assert p.p == 3.0


def test_hessian_boundary_local_only():
    p = hessian_params(4, 2, 5)
    assert p.local_only


def test_hessian_rejects_q_le_k():
    with pytest.raises(RegimeError, match="q <= k"):
        hessian_params(5, 2, 2)
    with pytest.raises(RegimeError, match="k out of range"):
        hessian_params(5, 6, 10)


def test_critical_exponents_quasilinear():
    assert critical_exponents(make_params(3, 1, 2, 5)) == (3.0, 5.0)
    assert critical_exponents(make_params(4, 1, 2, 5)) == (2.0, 3.0)


def test_critical_exponents_hessian():
    q_star, q_ss = critical_exponents(hessian_params(5, 1, 5))
    assert abs(q_star - 5.0 / 3.0) < 1e-15
    assert q_ss is None


def test_critical_exponents_liouville_regime():
    with pytest.raises(RegimeError, match="Liouville"):
        critical_exponents(make_params(2, 0.4, 3, 4))
    with pytest.raises(RegimeError, match="Liouville"):
        critical_exponents(hessian_params(4, 2, 5))


def test_q_star_ordering():
    # q* < q** whenever both exist
    rng = np.random.default_rng(7)
    for _ in range(200):
        n = rng.integers(2, 7)
        p = rng.uniform(1.05, n - 0.05)
        q_star, q_ss = critical_exponents(make_params(n, 1, p, p + 5))
        assert q_star < q_ss


def test_subadditivity_constant():
    assert subadditivity_constant(2.0) == 1.0
    assert subadditivity_constant(3.0) == 1.0          # p' - 2 < 0
    assert subadditivity_constant(1.5) == 2.0          # p' = 3
    # continuity across p = 2
    for p in (1.999999, 2.000001):
        assert abs(subadditivity_constant(p) - 1.0) < 1e-5


def test_iteration_constants_p2_q2():
    ic = iteration_constants(make_params(3, 1, 2, 2), 1.0)
    assert abs(ic.eps - 0.5) <= 1e-12
    assert abs(ic.x0 - 1.0) <= 1e-12
    assert ic.fixed_point_residual() <= 1e-10


def test_iteration_constants_p2_q5():
    # eps^(1/(p-1)) c(p) = (4/5)^(4/5) (1/5)^(1/5) and p = 2, so eps = that
    # product; the spec example's extra square contradicts its own
    # fixed-point check (see decisions ledger)
    ic = iteration_constants(make_params(3, 1, 2, 5), 1.0)
    a = (4.0 / 5.0) ** 0.8 * (1.0 / 5.0) ** 0.2
    assert abs(ic.eps - a) < 1e-14
    assert abs(ic.x0 - (5.0 * a) ** (-5.0 / 4.0)) < 1e-14
    assert ic.fixed_point_residual() <= 1e-10


def test_x0_matches_paper_exponent_form():
    rng = np.random.default_rng(11)
    for _ in range(100):
        p = rng.uniform(1.2, 4.0)
        q = p - 1 + rng.uniform(0.2, 5.0)
        C = 10.0 ** rng.uniform(-2, 2)
        ic = iteration_constants(make_params(3, 0.1, p, q), C)
        a = ic._a
        x0_paper = ((q / (p - 1.0)) * a * C ** (1.0 / q)) \
            ** (q * (p - 1.0) / (p - 1.0 - q))
        assert abs(x0_paper - ic.x0) < 1e-9 * ic.x0


def test_c_sequence_monotone_to_x0():
    # eps is critical (tangency), so c_k -> x0 at rate O(1/k); assert
    # monotone approach inside the 1/k envelope rather than a fixed gap
    for (p, q, C) in [(2.0, 2.0, 1.0), (2.0, 5.0, 1.0), (3.0, 5.0, 2.0),
                      (1.5, 3.0, 0.7)]:
        ic = iteration_constants(make_params(5, 0.2, p, q), C)
        seq = ic.c_sequence(4000)
        arr = np.asarray(seq)
        assert np.all(np.diff(arr) >= 0)
        assert arr[0] == 0.0
        a = ic._a
        assert abs(seq[1] - (a * 1.0) ** q) < 1e-14 * max(1.0, seq[1])
        assert np.all(arr <= ic.x0 * (1 + 1e-12))
        gaps = ic.x0 - arr
        # O(1/k) envelope: gap at 4000 well below gap at 400
        assert gaps[-1] < 0.2 * gaps[399]
        assert gaps[-1] < 0.05 * ic.x0


def test_unconstrained_C0():
    ic = iteration_constants(make_params(3, 1, 2, 3), 0.0)
    assert ic.unconstrained
    assert math.isinf(ic.eps)


def test_negative_C_rejected():
    with pytest.raises(RegimeError):
        iteration_constants(make_params(3, 1, 2, 3), -1.0)
