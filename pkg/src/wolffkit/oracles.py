"""Ground-truth generators: explicit radial singular solutions, Dirac
closed forms, and a brute quadrature double for the fast potential paths.

Radial residuals use centered second-order differences on a log-spaced mesh
with exact chain-rule factors; the k-Hessian of a radial function is
computed from the eigenvalues of its Hessian (u'' once, u'/r with
multiplicity n-1).
"""

import math

import numpy as np

from .measures import RadialPowerMeasure
from .params import RegimeError, critical_exponents


def radial_plap_solution(params):
    """(c, exponent) of the singular global solution u = c |x|^(-p/(q-p+1))
    of -div(|grad u|^(p-2) grad u) = u^q.

    Requires 1 < p < n and q above the first critical exponent.
    """
    n, p, q = params.n, params.p, params.q
    if not 1.0 < p < n:
        raise RegimeError(f"need 1 < p < n (p={p}, n={n})")
    q_star, _ = critical_exponents(params)
    bracket = q * (n - p) - n * (p - 1.0)
    if q <= q_star or bracket <= 0.0:
        raise RegimeError(
            f"no singular solution in regime: q={q} <= q*={q_star}")
    c = (p ** (p - 1.0) / (q - p + 1.0) ** p * bracket) ** (1.0 / (q - p + 1.0))
    return c, -p / (q - p + 1.0)


def radial_hessian_solution(n, k, q):
    """(c', exponent) of the singular solution u = c' |x|^(-2k/(q-k)) of
    F_k[-u] = u^q, for 1 <= k < n/2 and q > nk/(n-2k)."""
    n = int(n)
    k = int(k)
    if not 1 <= k or not k < n / 2.0:
        raise RegimeError(f"need 1 <= k < n/2 (k={k}, n={n})")
    q = float(q)
    q_star = n * k / (n - 2.0 * k)
    bracket = q * (n - 2.0 * k) - n * k
    if q <= q_star or bracket <= 0.0:
        raise RegimeError(f"no singular solution in regime: q={q} <= q*={q_star}")
    e = 1.0 / (q - k)
    c = ((math.factorial(n - 1) / (math.factorial(k) * math.factorial(n - k))) ** e
         * ((2.0 * k) ** k / (q - k) ** (k + 1)) ** e
         * bracket ** e)
    return c, -2.0 * k / (q - k)


def _log_mesh_derivatives(profile, mesh):
    """Centered first and second radial derivatives on a log-uniform mesh."""
    u = np.asarray(profile, dtype=float)
    r = np.asarray(mesh, dtype=float)
    if len(r) < 5:
        raise ValueError("mesh too coarse: need at least 5 points")
    if np.any(r <= 0) or np.any(np.diff(r) <= 0):
        raise ValueError("mesh must be positive and strictly increasing")
    s = np.log(r)
    ds = np.diff(s)
    if np.max(np.abs(ds - ds[0])) > 1e-8 * ds[0]:
        raise ValueError("mesh must be log-uniform")
    h = float(ds.mean())
    us = np.full_like(u, np.nan)
    uss = np.full_like(u, np.nan)
    us[1:-1] = (u[2:] - u[:-2]) / (2.0 * h)
    uss[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / (h * h)
    # d/dr = (1/r) d/ds, d2/dr2 = (1/r^2)(d2/ds2 - d/ds)
    du = us / r
    d2u = (uss - us) / (r * r)
    return du, d2u


def plap_radial_residual(profile, params, mesh):
    """sup over the interior mesh of |expanded radial p-Laplace residual|.

    Residual = -( (p-1)|u'|^(p-2) u'' + (n-1)|u'|^(p-2) u'/r ) - u^q,
    the expanded form of -r^(1-n) (r^(n-1) |u'|^(p-2) u')'.
    """
    n, p, q = params.n, params.p, params.q
    u = np.asarray(profile, dtype=float)
    r = np.asarray(mesh, dtype=float)
    du, d2u = _log_mesh_derivatives(u, r)
    w = np.abs(du) ** (p - 2.0)
    op = -((p - 1.0) * w * d2u + (n - 1.0) * w * du / r)
    res = np.abs(op - u ** q)
    return float(np.nanmax(res[1:-1]))


def hessian_radial_residual(profile, n, k, q, mesh):
    """sup-norm residual of F_k[-u] = u^q for a radial profile.

    For radial v the Hessian eigenvalues are v'' (once) and v'/r (n-1
    times), so S_k = C(n-1,k) (v'/r)^k + C(n-1,k-1) v'' (v'/r)^(k-1).
    """
    n = int(n)
    k = int(k)
    u = np.asarray(profile, dtype=float)
    r = np.asarray(mesh, dtype=float)
    du, d2u = _log_mesh_derivatives(u, r)
    dv = -du
    d2v = -d2u
    lam = dv / r
    if k == 1:
        # S_1 = (n-1) v'/r + v'': matches the p=2 quasilinear path
        sk = (n - 1.0) * 1.0 * lam + 1.0 * 1.0 * d2v
    else:
        sk = (math.comb(n - 1, k) * lam ** k
              + math.comb(n - 1, k - 1) * d2v * lam ** (k - 1))
    res = np.abs(sk - u ** q)
    return float(np.nanmax(res[1:-1]))


def log_mesh(lo, hi, count):
    """Log-spaced radial mesh, the canonical residual grid."""
    return np.geomspace(lo, hi, count)


def wolff_dirac_closed_form(params, distance, r):
    """W^r_{alpha,p} of a unit Dirac mass at distance |x - y| = distance.

    ((p-1)/(n - alpha p)) * (distance^(-beta) - r^(-beta)) with
    beta = (n - alpha p)/(p - 1); the r-term drops for r = inf, and the
    value is 0 for r < distance.
    """
    if distance <= 0:
        raise ValueError("distance must be positive")
    n, p = params.n, params.p
    ap = params.alpha * p
    if ap >= n:
        raise ValueError("closed form requires alpha*p < n")
    beta = (n - ap) / (p - 1.0)
    if r < distance:
        return 0.0
    tail = 0.0 if r == math.inf else r ** (-beta)
    return (p - 1.0) / (n - ap) * (distance ** (-beta) - tail)


def brute_wolff(mu, x, params, r, nodes_per_decade=64):
    """Independent trapezoid-in-log-t oracle for the Wolff potential.

    Samples m(t) = mu(B_t(x)) on a geometric grid and integrates
    [m(t)/t^(n - alpha p)]^(1/(p-1)) dt/t by the trapezoid rule in log t;
    the constant-mass region beyond the support is added in closed form.
    """
    if nodes_per_decade < 8:
        raise ValueError("nodes_per_decade must be >= 8")
    n, p = mu.n, params.p
    s = 1.0 / (p - 1.0)
    kappa = s * (n - params.alpha * p)
    x = np.asarray(x, dtype=float)

    if isinstance(mu, RadialPowerMeasure):
        d = float(np.linalg.norm(x - mu.center))
        t_first = max(d - mu.R, 0.0)
        t_sat = d + mu.R
        if t_first == 0.0:
            t_first = t_sat * 1e-6
    else:
        jumps, cums = mu.ball_profile(x)
        pos = jumps[cums > 0]
        if len(pos) == 0:
            return 0.0
        if pos[0] == 0.0:
            return math.inf
        t_first = pos[0] * (1.0 - 1e-12)
        t_sat = float(jumps[-1])

    total_mass = mu.total_mass()
    if total_mass == 0.0:
        return 0.0
    t_hi = min(r, t_sat)
    total = 0.0
    if t_hi > t_first:
        decades = math.log10(t_hi / t_first)
        count = max(int(math.ceil(decades * nodes_per_decade)), 8)
        ts = np.geomspace(t_first, t_hi, count + 1)
        masses = np.array([mu.mass_ball(x, t) for t in ts])
        integrand = masses ** s * ts ** (-kappa)     # in d(log t)
        tau = np.log(ts)
        total += float(np.trapezoid(integrand, tau))
    if r > t_sat:
        if kappa <= 0.0:
            return math.inf
        upper = 0.0 if r == math.inf else r ** (-kappa)
        total += total_mass ** s * (t_sat ** (-kappa) - upper) / kappa
    return total
