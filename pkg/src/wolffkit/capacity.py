"""Capacity estimation through the Wolff-energy duality.

Only lower bounds are certified: any trial measure supported in E and
rescaled so its capacity-index Wolff potential is <= 1 on its support has
admissible mass, which bounds the dual capacity from below.  Upper bounds
would require the primal minimization over test functions and are out of
scope (disclosed in reports).
"""

import math

import numpy as np

from .dyadic import DyadicCube
from .measures import CellDensityMeasure, PointMassMeasure
from .potentials import _profile_potential, riesz_truncated
from .verifiers import VerifierReport


def capacity_indices(params):
    """(kernel order, s) of the solvability capacity Cap_{I_{alpha p}, s},
    s = q/(q-p+1); the dual Wolff integrand is
    [mu(B_t)/t^(n - alpha p s)]^(1/(s-1))."""
    s = params.q / (params.q - params.p + 1.0)
    return params.alpha * params.p, s


def _support_samples(trial):
    if isinstance(trial, PointMassMeasure):
        return trial.positions[trial.masses > 0]
    if isinstance(trial, CellDensityMeasure):
        centers = trial.cell_centers()
        return centers[trial.values.ravel() > 0]
    raise TypeError("trial must be a point-mass or cell-density measure")


def capacity_wolff(trial, x, params, r):
    """The capacity-index Wolff potential W^r_{(alpha p)/s', s} of the trial."""
    beta, s = capacity_indices(params)
    order = beta * s                         # kernel order of the profile
    s_exp = 1.0 / (s - 1.0)
    return _profile_potential(trial, x, order, s_exp, 0.0, r)[0]


def riesz_capacity_lower(E, trial, params, R):
    """Certified lower bound for Cap_{I_{alpha p}, q/(q-p+1)} via a trial
    measure supported in E: trial_mass / M^(s-1) where M is the sampled sup
    of the 4R-truncated capacity Wolff potential on the support.

    Atomic trials have M = +inf and contribute 0 (atoms carry no capacity).
    Exactly invariant under positive scaling of the trial.
    """
    mass = trial.total_mass()
    if mass == 0.0:
        return 0.0, {"note": "zero trial measure"}
    samples = _support_samples(trial)
    vals = np.array([capacity_wolff(trial, x, params, 4.0 * R)
                     for x in samples])
    m_sup = float(np.max(vals))
    if math.isinf(m_sup):
        return 0.0, {"note": "atoms have zero capacity contribution: "
                             "W(trial) = +inf on the support"}
    _, s = capacity_indices(params)
    bound = mass / m_sup ** (s - 1.0)
    return bound, {"support_samples": int(len(samples)), "sup_W": m_sup,
                   "truncation": 4.0 * R,
                   "certifies": "lower bound only (dual feasible measure)"}


def bessel_energy(mu, params, R, grid):
    """Truncated-Riesz stand-in for the Bessel energy:
    int [I^{2R}_{alpha p} mu]^(q/(p-1)) dx by cell quadrature on ``grid``.

    An atomic mu whose local singularity power (n - alpha p) q/(p-1) >= n
    makes the energy diverge; the +inf sentinel is returned directly.
    """
    order = params.alpha * params.p
    expo = params.q / (params.p - 1.0)
    if mu.total_mass() == 0.0:
        return 0.0
    if isinstance(mu, PointMassMeasure):
        if (mu.n - order) * expo >= mu.n:
            return math.inf
    shape = (2 ** (grid.box.generation - grid.generation),) * grid.box.n
    holder = CellDensityMeasure(grid.box, grid.generation, np.zeros(shape))
    centers = holder.cell_centers()
    vals = np.array([riesz_truncated(mu, x, order, 2.0 * R)
                     for x in centers])
    return float(np.sum(vals ** expo) * holder.cell_volume)


def capacity_scaling_check(params, lambdas, depth=3, threshold=None):
    """Log-log slope of the capacity lower bound over dilated cubes.

    Uses E_lambda = the cube [0, lambda)^n with a uniform cell-density
    trial at ``depth`` generations below the cube, R = side(E).  The
    analytic slope is n - pq/(q-p+1); supercritical regime required.
    """
    expo = params.growth_exponent
    if expo <= 0:
        raise ValueError(f"supercritical regime pq/(q-p+1) < n required "
                         f"(growth exponent {expo} <= 0)")
    lambdas = sorted(float(v) for v in lambdas)
    if len(lambdas) < 3:
        raise ValueError("need >= 3 scales for a slope fit")
    n = params.n
    bounds = []
    for lam in lambdas:
        g = math.log2(lam)
        if abs(g - round(g)) > 1e-12:
            raise ValueError("scales must be powers of 2 (dyadic dilation)")
        g = int(round(g))
        cube = DyadicCube(g, (0,) * n)
        per = 2 ** depth
        trial = CellDensityMeasure(cube, g - depth, np.ones((per,) * n))
        val, _ = riesz_capacity_lower(cube, trial, params, R=cube.side)
        bounds.append(val)
    logs = np.log(np.asarray(lambdas))
    logb = np.log(np.asarray(bounds))
    slope, intercept = np.polyfit(logs, logb, 1)
    report = VerifierReport(
        best_constant=float(slope),
        witness={"type": "fit", "lambdas": lambdas, "bounds": bounds,
                 "intercept": float(intercept)},
        samples=len(lambdas),
        notes=[f"analytic slope {expo}", "lower bounds only"],
        config={"depth": depth, "analytic_slope": expo,
                "deviation": float(abs(slope - expo))})
    if threshold is not None:
        report.passed = bool(abs(slope - expo) <= threshold)
    return report
