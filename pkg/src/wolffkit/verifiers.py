"""Empirical best-constant computation for the testing inequalities, the
iterated pointwise condition, growth bounds, Fefferman-Phong, the dyadic
three-quantity equivalence, local integral estimates, and the dyadic
Carleson embedding.

Suprema over "all cubes/balls/points" are taken over the supplied (or
default) families, which every report discloses; a +inf best constant is a
first-class result carrying the divergence reason.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dyadic import DyadicCube
from .measures import (CellDensityMeasure, PointMassMeasure,
                       RadialPowerMeasure, mass_ball)
from .potentials import (GenerationWindow, wolff_truncated,
                         wolff_truncated_info, riesz_truncated,
                         _profile_potential)
from .solver import _block_sum, _block_repeat


@dataclass
class VerifierReport:
    best_constant: float
    witness: dict
    samples: int
    passed: bool | None = None
    notes: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    values: list = field(default_factory=list)

    def with_threshold(self, threshold):
        if threshold is not None:
            self.passed = bool(self.best_constant <= threshold)
        return self

    def to_json(self):
        return {"best_constant": self.best_constant,
                "witness": self.witness,
                "samples": self.samples,
                "passed": self.passed,
                "notes": list(self.notes),
                "config": self.config,
                "values": list(self.values)}


def _pool_map(fn, items):
    workers = int(os.environ.get("WOLFFKIT_THREADS", "1"))
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _lattice_masses(omega, parent, g):
    """Masses of the generation-g dyadic subcubes of ``parent`` as an array
    of shape (2^(parent.generation - g),) * n, exact for point and cell
    measures."""
    n = parent.n
    per = 2 ** (parent.generation - g)
    out = np.zeros((per,) * n)
    base = np.array([i * per for i in parent.index])
    if isinstance(omega, PointMassMeasure):
        lo = parent.corner
        hi = lo + parent.side
        inside = np.all((omega.positions >= lo) & (omega.positions < hi), axis=1)
        pos = omega.positions[inside]
        mas = omega.masses[inside]
        if len(mas):
            idx = np.floor(pos * 2.0 ** (-g)).astype(np.int64) - base
            np.add.at(out, tuple(idx.T), mas)
        return out
    if isinstance(omega, CellDensityMeasure):
        gc = omega.generation
        if g > omega.box.generation:
            # the whole density box sits inside a single lattice cube
            idx = np.array([i >> (g - omega.box.generation)
                            for i in omega.box.index]) - base
            if np.all(idx >= 0) and np.all(idx < per):
                out[tuple(int(i) for i in idx)] = omega.total_mass()
            return out
        # indices of the omega box corner on the generation-g lattice
        if g <= gc:
            vals = _block_repeat(omega.values, 2 ** (gc - g)) * 2.0 ** (g * n)
            corner = np.array([i * 2 ** (omega.box.generation - g)
                               for i in omega.box.index]) - base
        else:
            vals = _block_sum(omega.values, 2 ** (g - gc)) * omega.cell_volume
            corner = np.array([i * 2 ** (omega.box.generation - g)
                               for i in omega.box.index]) - base
        lo = np.maximum(corner, 0)
        hi = np.minimum(corner + vals.shape[0], per)
        if np.any(hi <= lo):
            return out
        src = tuple(slice(int(a - c), int(b - c))
                    for a, b, c in zip(lo, hi, corner))
        dst = tuple(slice(int(a), int(b)) for a, b in zip(lo, hi))
        out[dst] = vals[src]
        return out
    # generic fallback (radial measures): per-cube quadrature
    it = np.ndindex(*(per,) * n)
    for multi in it:
        cube = DyadicCube(g, tuple(int(b + m) for b, m in zip(base, multi)))
        out[multi] = omega.mass_cube(cube)
    return out


def chain_sums(omega, parent, g_min, order, exponent):
    """sum over generations g_min..parent.generation of
    (mass(Q_g)/side^(n-order))^exponent, per finest cell of ``parent``.

    This is the exact cell-wise value of the window-truncated dyadic chain
    sum; the integrand of the testing inequalities is constant on finest
    cells."""
    n = parent.n
    per = 2 ** (parent.generation - g_min)
    cs = np.zeros((per,) * n)
    for g in range(g_min, parent.generation + 1):
        masses = _lattice_masses(omega, parent, g)
        d = (2.0 ** g) ** (n - order)
        terms = masses / d
        if exponent != 1.0:
            terms = terms ** exponent
        cs += _block_repeat(terms, 2 ** (g - g_min))
    return cs


def equivalence_A123(mu, P, params, window):
    """The three equivalent dyadic quantities (A1, A2, A3) on cube P,
    window-truncated, computed as exact finite sums."""
    n = P.n
    p, q = params.p, params.q
    order = params.alpha * p
    g_min = window.g_min
    if g_min > P.generation:
        raise ValueError("window must reach below P")
    cellvol = 2.0 ** (g_min * n)
    a1 = 0.0
    for g in range(g_min, P.generation + 1):
        masses = _lattice_masses(mu, P, g)
        d = (2.0 ** g) ** (n - order)
        a1 += float(np.sum((masses / d) ** (q / (p - 1.0)))) * 2.0 ** (g * n)
    wolff_chain = chain_sums(mu, P, g_min, order, 1.0 / (p - 1.0))
    a2 = float(np.sum(wolff_chain ** q)) * cellvol
    riesz_chain = chain_sums(mu, P, g_min, order, 1.0)
    a3 = float(np.sum(riesz_chain ** (q / (p - 1.0)))) * cellvol
    return a1, a2, a3


def testing_inequality_dyadic(omega, P_list, params, window_depth=4):
    """Best constants of the two dyadic testing inequalities over P_list.

    Returns (riesz_form, wolff_form): the q/(p-1)-power form on the Riesz
    chain sum and the q-power form on the Wolff chain sum.  Zero-mass cubes
    are skipped with a note.  The downward sum is truncated window_depth
    generations below each P (disclosed in config).
    """
    p, q = params.p, params.q
    order = params.alpha * p
    best = [0.0, 0.0]
    wit = [None, None]
    vals = [[], []]
    notes = []
    count = 0
    for P in P_list:
        mass = omega.mass_cube(P)
        if mass <= 0.0:
            notes.append(f"skipped zero-mass cube gen={P.generation} "
                         f"index={P.index}")
            continue
        count += 1
        g_min = P.generation - window_depth
        cellvol = 2.0 ** (g_min * P.n)
        riesz_chain = chain_sums(omega, P, g_min, order, 1.0)
        lhs1 = float(np.sum(riesz_chain ** (q / (p - 1.0)))) * cellvol
        wolff_chain = chain_sums(omega, P, g_min, order, 1.0 / (p - 1.0))
        lhs2 = float(np.sum(wolff_chain ** q)) * cellvol
        for j, lhs in enumerate((lhs1, lhs2)):
            c = lhs / mass
            vals[j].append(c)
            if c > best[j]:
                best[j] = c
                wit[j] = {"type": "cube", "generation": P.generation,
                          "index": list(P.index)}
    config = {"window_depth": window_depth,
              "family": "user-supplied dyadic cubes"}
    if count == 0:
        notes.append("vacuous: no cube with positive mass")
    reports = tuple(
        VerifierReport(best_constant=best[j],
                       witness=wit[j] or {},
                       samples=count, notes=list(notes), config=dict(config),
                       values=vals[j])
        for j in range(2))
    return reports


def _gauss_nodes_ball(center, radius, order, n):
    """Tensor Gauss-Legendre nodes over the bounding cube, masked to the
    closed ball; returns (points, weights)."""
    x, w = np.polynomial.legendre.leggauss(order)
    axes = [center[j] + radius * x for j in range(n)]
    wts = [radius * w for _ in range(n)]
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    wgrids = np.meshgrid(*wts, indexing="ij")
    weight = np.ones(pts.shape[0])
    for g in wgrids:
        weight = weight * g.ravel()
    d = np.linalg.norm(pts - np.asarray(center, float), axis=1)
    keep = d <= radius
    return pts[keep], weight[keep]


def _atom_energy_divergent(omega_b, params, power):
    """True when omega_b has an atom and the |y|^(-(n-alpha p)/(p-1)*power)
    local singularity of the potential power is non-integrable."""
    if not isinstance(omega_b, PointMassMeasure) or omega_b.total_mass() == 0:
        return False
    gamma = power * (omega_b.n - params.alpha * params.p) / (params.p - 1.0)
    return gamma >= omega_b.n


def testing_inequality_balls(omega, balls, params, r, quad_order=12,
                             threshold=None):
    """Best C in int_B [W^r omega_B]^q dx <= C omega(B) over the supplied
    balls (center, radius), by fixed-order product quadrature.

    An atomic omega_B with non-integrable singularity exponent
    q(n - alpha p)/(p-1) >= n yields the +inf sentinel.
    """
    from .measures import restrict
    q = params.q
    best = 0.0
    wit = None
    vals = []
    notes = []
    count = 0
    for center, radius in balls:
        m = mass_ball(omega, center, radius)
        if m <= 0.0:
            notes.append(f"skipped zero-mass ball r={radius}")
            continue
        count += 1
        omega_b = restrict(omega, ("ball", center, radius))
        if _atom_energy_divergent(omega_b, params, q):
            c = math.inf
            notes.append("atomic restriction: integrand singularity "
                         "exponent >= n, integral diverges")
        else:
            pts, wts = _gauss_nodes_ball(np.asarray(center, float), radius,
                                         quad_order, omega.n)
            wvals = np.array(_pool_map(
                lambda x: wolff_truncated(omega_b, x, params, r), list(pts)))
            c = float(np.sum(wts * wvals ** q)) / m
        vals.append(c)
        if c > best or (math.isinf(c) and not math.isinf(best)):
            best = c
            wit = {"type": "ball", "center": list(map(float, center)),
                   "radius": float(radius)}
    if count == 0:
        notes.append("vacuous: no ball with positive mass")
    return VerifierReport(
        best_constant=best, witness=wit or {}, samples=count, notes=notes,
        config={"r": r, "quad_order": quad_order,
                "family": "user-supplied balls"},
        values=vals).with_threshold(threshold)


@dataclass(frozen=True)
class CellGrid:
    """Realization grid for derived densities: cells of ``generation``
    inside the dyadic ``box``."""

    box: DyadicCube
    generation: int


def realize_density(fn, grid, power=1.0):
    """CellDensityMeasure with values fn(center)^power on the grid cells."""
    shape = (2 ** (grid.box.generation - grid.generation),) * grid.box.n
    holder = CellDensityMeasure(grid.box, grid.generation, np.zeros(shape))
    centers = holder.cell_centers()
    vals = np.array([fn(c) for c in centers])
    if np.any(~np.isfinite(vals)):
        raise ValueError("density realization hit a non-finite value; "
                         "shift the grid off the measure's atoms")
    return CellDensityMeasure(grid.box, grid.generation,
                              (vals ** power).reshape(shape))


def pointwise_condition(omega, xs, params, r, nu_grid=None, threshold=None):
    """Best C in W^r (W^r omega)^q (x) <= C W^r omega (x) over xs.

    The inner density (W^r omega)^q dx is realized as a CellDensityMeasure
    on ``nu_grid`` (required).  For r = inf a nonzero measure with
    q <= n(p-1)/(n - alpha p) fails for every finite C (the far-field ratio
    grows without bound); this exact regime analysis returns the +inf
    sentinel directly, since no bounded realization can witness the global
    divergence.
    """
    total = omega.total_mass()
    if total == 0.0:
        return VerifierReport(best_constant=0.0, witness={}, samples=0,
                              notes=["vacuous: omega = 0"],
                              config={"r": r}).with_threshold(threshold)
    if r == math.inf:
        if params.local_only:
            raise ValueError("r = inf requires alpha*p < n")
        q_crit = params.growth_critical_q
        if params.q <= q_crit * (1.0 + 1e-12):
            note = (f"Liouville regime: q = {params.q} <= {q_crit} = "
                    f"n(p-1)/(n-alpha p); the iterated-potential ratio grows "
                    "without bound in the far field for every nonzero omega")
            return VerifierReport(
                best_constant=math.inf,
                witness={"type": "regime", "q_critical": q_crit},
                samples=len(xs), notes=[note],
                config={"r": r}).with_threshold(threshold)
    if nu_grid is None:
        raise ValueError("pointwise_condition: nu_grid configuration required")
    nu = realize_density(
        lambda c: wolff_truncated(omega, c, params, r), nu_grid,
        power=params.q)
    best = 0.0
    wit = None
    vals = []
    notes = []
    used = 0
    for x in xs:
        denom = wolff_truncated(omega, x, params, r)
        if denom == 0.0 or math.isinf(denom):
            notes.append(f"skipped x={list(map(float, x))}: "
                         f"W omega is {denom}")
            continue
        numer = wolff_truncated(nu, x, params, r)
        used += 1
        c = numer / denom
        vals.append(c)
        if c > best:
            best = c
            wit = {"type": "point", "x": list(map(float, x))}
    return VerifierReport(
        best_constant=best, witness=wit or {}, samples=used, notes=notes,
        config={"r": r, "nu_grid": {"box_generation": nu_grid.box.generation,
                                    "box_index": list(nu_grid.box.index),
                                    "cell_generation": nu_grid.generation}},
        values=vals).with_threshold(threshold)


def frostman_ratio(omega, xs, t_range, params, samples_per_decade=16,
                   threshold=None):
    """sup over sampled (x, t) of omega(B_t(x)) / t^(n - pq/(q-p+1)),
    with geometric t sampling in [t_min, t_max]."""
    t_min, t_max = t_range
    if t_min <= 0:
        raise ValueError("t_min must be positive")
    expo = params.growth_exponent
    notes = []
    if expo <= 0:
        notes.append(f"Liouville regime: growth exponent n - pq/(q-p+1) = "
                     f"{expo} <= 0; only omega = 0 passes")
    decades = math.log10(t_max / t_min)
    count = max(int(math.ceil(decades * samples_per_decade)), 2)
    ts = np.geomspace(t_min, t_max, count + 1)
    best = 0.0
    wit = None
    vals = []
    for x in xs:
        for t in ts:
            c = mass_ball(omega, x, t) / t ** expo
            vals.append(c)
            if c > best:
                best = c
                wit = {"type": "ball", "center": list(map(float, x)),
                       "radius": float(t)}
    return VerifierReport(
        best_constant=best, witness=wit or {}, samples=len(xs) * len(ts),
        notes=notes,
        config={"t_range": [t_min, t_max],
                "samples_per_decade": samples_per_decade,
                "growth_exponent": expo},
        values=vals).with_threshold(threshold)


def fefferman_phong(f, delta, balls, params, threshold=None):
    """Best C in int_{B_R} f^(1+delta) dx <= C R^(n - (1+delta) pq/(q-p+1))
    over the supplied balls, by cell sums of the density."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    if not isinstance(f, CellDensityMeasure):
        raise TypeError("fefferman_phong expects a cell density")
    p, q = params.p, params.q
    expo = f.n - (1.0 + delta) * p * q / (q - p + 1.0)
    centers = f.cell_centers()
    dens = f.values.ravel()
    best = 0.0
    wit = None
    vals = []
    for center, radius in balls:
        d = np.linalg.norm(centers - np.asarray(center, float), axis=1)
        integral = float(np.sum(dens[d <= radius] ** (1.0 + delta))
                         * f.cell_volume)
        c = integral / radius ** expo
        vals.append(c)
        if c > best:
            best = c
            wit = {"type": "ball", "center": list(map(float, center)),
                   "radius": float(radius)}
    return VerifierReport(
        best_constant=best, witness=wit or {}, samples=len(balls),
        config={"delta": delta, "exponent": expo},
        values=vals).with_threshold(threshold)


def local_integral_estimate(u_samples, balls, params, log_outer_R=None,
                            threshold=None):
    """Ratio of cell-sum integrals of u^q over balls to the regime power.

    Supercritical (pq/(q-p+1) < n): ratio against R^(n - pq/(q-p+1)) per
    ball.  Critical (pq/(q-p+1) = n, log_outer_R supplied): ratio against
    (log 2R/r)^((1-p)/(q-p+1)).  A critical-form call outside the critical
    regime is a regime error.
    """
    p, q = params.p, params.q
    pq_exp = p * q / (q - p + 1.0)
    dens = u_samples.values.ravel() ** q
    holder = u_samples.as_density()
    centers = holder.cell_centers()
    vol = u_samples.cell_volume
    critical = log_outer_R is not None
    if critical and abs(pq_exp - u_samples.n) > 1e-9:
        raise ValueError(f"not critical: pq/(q-p+1) = {pq_exp} != n = "
                         f"{u_samples.n}")
    best = 0.0
    wit = None
    vals = []
    for center, radius in balls:
        d = np.linalg.norm(centers - np.asarray(center, float), axis=1)
        integral = float(np.sum(dens[d <= radius]) * vol)
        if critical:
            denom = math.log(2.0 * log_outer_R / radius) ** \
                ((1.0 - p) / (q - p + 1.0))
        else:
            denom = radius ** (u_samples.n - pq_exp)
        c = integral / denom
        vals.append(c)
        if c > best:
            best = c
            wit = {"type": "ball", "center": list(map(float, center)),
                   "radius": float(radius)}
    return VerifierReport(
        best_constant=best, witness=wit or {}, samples=len(balls),
        config={"critical": critical, "log_outer_R": log_outer_R},
        values=vals).with_threshold(threshold)


def _integral_against(fn_values, omega, lattice_parent, g):
    """integral of a lattice-constant function against omega, exactly:
    sum over generation-g cells of value * omega(cell)."""
    masses = _lattice_masses(omega, lattice_parent, g)
    return float(np.sum(fn_values * masses))


def carleson_embedding_check(mu, P, f_choices, params, window_depth=4,
                             threshold=None):
    """Dyadic Carleson embedding at the critical exponent:

        sum_{Q in P} mu(Q)^s [mu(Q)^{-1} int_Q f dmu]^s <= C int_P f^s dmu,

    s = q/(p-1), over the supplied f family.  The premise (the critical
    reduction of the testing sum, sum_{Q in P'} mu(Q)^s <= C' mu(P')) is
    checked first and reported; a premise failure is a note, not an abort.
    """
    p, q = params.p, params.q
    s = q / (p - 1.0)
    pq_exp = p * q / (q - p + 1.0)
    notes = []
    if abs(pq_exp - P.n) > 1e-9:
        raise ValueError(f"carleson check needs the critical regime "
                         f"pq/(q-p+1) = n, got {pq_exp} vs n = {P.n}")
    g_min = P.generation - window_depth
    # premise: per subcube P', window-truncated
    premise_best = 0.0
    masses_by_gen = {g: _lattice_masses(mu, P, g)
                     for g in range(g_min, P.generation + 1)}
    for gp in range(g_min, P.generation + 1):
        mp = masses_by_gen[gp]
        tail = np.zeros_like(mp)
        for g in range(g_min, gp + 1):
            tail += _block_sum(masses_by_gen[g] ** s, 2 ** (gp - g))
        ratio = tail[mp > 0] / mp[mp > 0]
        if ratio.size:
            premise_best = max(premise_best, float(np.max(ratio)))
    config = {"window_depth": window_depth, "premise_constant": premise_best}

    best = 0.0
    wit = None
    vals = []
    for idx, f in enumerate(f_choices):
        if f.generation < g_min:
            raise ValueError("f finer than the window resolution")
        fvals_fine = _block_repeat(f.values, 2 ** (f.generation - g_min)) \
            if f.generation > g_min else f.values
        rhs = _integral_against(fvals_fine ** s, mu, P, g_min)
        if rhs <= 0.0:
            notes.append(f"skipped f[{idx}]: zero integral")
            continue
        lhs = 0.0
        fine_contrib = fvals_fine * masses_by_gen[g_min]
        for g in range(g_min, P.generation + 1):
            mg = masses_by_gen[g]
            # int_Q f dmu: aggregate f * (finest masses) up to generation g
            intf = _block_sum(fine_contrib, 2 ** (g - g_min))
            pos = mg > 0
            lhs += float(np.sum(mg[pos] ** s
                                * (intf[pos] / mg[pos]) ** s))
        c = lhs / rhs
        vals.append(c)
        if c > best:
            best = c
            wit = {"type": "f_choice", "index": idx}
    return VerifierReport(
        best_constant=best, witness=wit or {}, samples=len(vals),
        notes=notes, config=config, values=vals).with_threshold(threshold)


def prop51_quantities(mu, params, r, grid):
    """The three equivalent energies of the continuous comparability
    statement: (a) the L^1(d mu) norm of the capacity-index Wolff
    potential, (b) the L^q(dx) energy of W^r_{alpha,p}, (c) the
    L^{q/(p-1)}(dx) energy of I^r_{alpha p}; (b) and (c) by cell quadrature
    on ``grid``."""
    p, q = params.p, params.q
    order_a = params.alpha * p * q / (q - p + 1.0)
    s_a = (q - p + 1.0) / (p - 1.0)
    if not isinstance(mu, PointMassMeasure):
        raise TypeError("prop51 quantity (a) is implemented for point measures")
    vals = [_profile_potential(mu, x, order_a, s_a, 0.0, r)[0]
            for x in mu.positions]
    a = float(np.dot(mu.masses, vals))
    shape = (2 ** (grid.box.generation - grid.generation),) * grid.box.n
    holder = CellDensityMeasure(grid.box, grid.generation, np.zeros(shape))
    centers = holder.cell_centers()
    vol = holder.cell_volume
    wvals = np.array([wolff_truncated(mu, x, params, r) for x in centers])
    b = float(np.sum(wvals ** q) * vol)
    ivals = np.array([riesz_truncated(mu, x, params.alpha * p, r)
                      for x in centers])
    c = float(np.sum(ivals ** (q / (p - 1.0))) * vol)
    return a, b, c
