"""Discrete model solver: the operator N f = W_{alpha,p}(f^q) on a grid and
the monotone Picard iteration u_{k+1} = N u_k + eps * f from u_0 = 0.

The iteration is run with the critical eps computed from a pointwise-ratio
bound C (estimated on the grid when not supplied, with a 1.1 safety
factor); the certificate records monotonicity, the two-sided majorant /
minorant bounds, and the majorant coefficient reached.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .measures import CellDensityMeasure
from .params import iteration_constants, majorant_safe_C


@dataclass
class GridFunction:
    """Nonnegative piecewise-constant function on the cells of a dyadic box."""

    box: object            # DyadicCube
    generation: int
    values: np.ndarray

    def __post_init__(self):
        per_axis = 2 ** (self.box.generation - self.generation)
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values.reshape((per_axis,) * self.box.n)
        if values.shape != (per_axis,) * self.box.n:
            raise ValueError(f"values shape {values.shape} incompatible with "
                             f"{(per_axis,) * self.box.n}")
        if np.any(values < 0):
            raise ValueError("grid function must be nonnegative")
        self.values = values

    @property
    def n(self):
        return self.box.n

    @property
    def cell_side(self):
        return 2.0 ** self.generation

    @property
    def cell_volume(self):
        return 2.0 ** (self.generation * self.n)

    def as_density(self, power=1.0):
        """CellDensityMeasure with density values**power."""
        vals = self.values if power == 1.0 else self.values ** power
        return CellDensityMeasure(self.box, self.generation, vals)

    def like(self, values):
        return GridFunction(self.box, self.generation, values)

    def to_json(self):
        return {"box": {"generation": self.box.generation,
                        "index": list(self.box.index)},
                "generation": self.generation,
                "values": [float(v) for v in self.values.ravel()]}


@dataclass
class ConvergenceCertificate:
    iterations: int
    sup_residual: float
    monotone: bool
    lower_ok: bool
    upper_ok: bool
    majorant_coefficient: float
    status: str                      # converged | max_iter | stalled | diverged
    eps: float
    C: float
    x0: float
    window: tuple
    notes: list = field(default_factory=list)

    @property
    def converged(self):
        return self.status == "converged"

    def to_json(self):
        return {"iterations": self.iterations,
                "sup_residual": self.sup_residual,
                "monotone": self.monotone,
                "lower_ok": self.lower_ok,
                "upper_ok": self.upper_ok,
                "majorant_coefficient": self.majorant_coefficient,
                "status": self.status,
                "eps": self.eps,
                "C": self.C,
                "x0": self.x0,
                "window": list(self.window),
                "notes": list(self.notes)}


def _block_sum(values, factor):
    """Sum over blocks of side ``factor`` along every axis."""
    if factor == 1:
        return values
    n = values.ndim
    m = values.shape[0] // factor
    shape = []
    for _ in range(n):
        shape.extend([m, factor])
    arr = values.reshape(shape)
    return arr.sum(axis=tuple(range(1, 2 * n, 2)))


def _block_repeat(values, factor):
    """Inverse of _block_sum's shape change: repeat each entry into blocks."""
    out = values
    for axis in range(values.ndim):
        out = np.repeat(out, factor, axis=axis)
    return out


def apply_N(f, params, window):
    """N f = dyadic Wolff potential of f^q dx at every cell center.

    Sums over window generations; cubes coarser than the box contribute the
    aggregated box mass, cubes finer than the cells see the constant cell
    density.  Overflowing values are reported, not raised.
    """
    n = f.n
    p, q = params.p, params.q
    s = 1.0 / (p - 1.0)
    order = params.alpha * p
    dens = f.values ** q
    cellvol = f.cell_volume
    out = np.zeros_like(f.values)
    g_cell = f.generation
    g_box = f.box.generation
    for g in window.generations():
        side = 2.0 ** g
        d = side ** (n - order)
        if g > g_box:
            masses = dens.sum() * cellvol
            terms = masses / d
            out = out + (terms if s == 1.0 else terms ** s)
        elif g >= g_cell:
            factor = 2 ** (g - g_cell)
            masses = _block_sum(dens, factor) * cellvol
            terms = masses / d
            out = out + _block_repeat(terms if s == 1.0 else terms ** s, factor)
        else:
            # sub-cell cube through the center: constant density
            masses = dens * side ** n
            terms = masses / d
            out = out + (terms if s == 1.0 else terms ** s)
    if np.any(~np.isfinite(out)):
        # keep inf entries; callers observe divergence as a value
        pass
    return f.like(out)


def residual(u, f, eps, params, window):
    """sup over cells of |u - N u - eps f|."""
    if u.values.shape != f.values.shape or u.generation != f.generation:
        raise ValueError("grid shape mismatch between u and f")
    nu = apply_N(u, params, window)
    return float(np.max(np.abs(u.values - nu.values - eps * f.values)))


def estimate_pointwise_C(f, params, window, safety=1.1):
    """Empirical ratio bound: safety * max over cells of N^2 f / N f."""
    nf = apply_N(f, params, window)
    n2f = apply_N(nf, params, window)
    mask = nf.values > 0
    if not np.any(mask):
        return 0.0
    return safety * float(np.max(n2f.values[mask] / nf.values[mask]))


def picard_solve(f, params, window, C=None, tol=1e-10, max_iter=2000,
                 eps_override=None):
    """Solve u = N u + eps f by monotone Picard iteration from u_0 = 0.

    C is the pointwise ratio bound sup N^2 f / N f (estimated on the grid
    when absent); the scheme runs at the critical eps of the inflated
    constant majorant_safe_C(C), which makes the per-iteration majorant
    u_k <= c_k N f + eps f a theorem rather than an observation.

    Returns (u, certificate).  The certificate's status is one of
    converged / max_iter / stalled / diverged; bounds are checked to
    double-precision rounding (relative slack 1e-12).
    """
    if np.any(f.values < 0):
        raise ValueError("source must be nonnegative")
    win = (window.g_min, window.g_max)

    if C is None:
        C = estimate_pointwise_C(f, params, window)
    consts = iteration_constants(params, majorant_safe_C(params, C))
    if consts.unconstrained:
        # N f = 0: the equation collapses to u = eps f with N u = 0
        eps = 1.0 if eps_override is None else eps_override
        u = f.like(eps * f.values)
        cert = ConvergenceCertificate(
            iterations=1, sup_residual=0.0, monotone=True, lower_ok=True,
            upper_ok=True, majorant_coefficient=0.0, status="converged",
            eps=eps, C=0.0, x0=0.0, window=win,
            notes=["unconstrained: N f = 0, trivial solution eps*f"])
        return u, cert

    eps = consts.eps if eps_override is None else eps_override
    nf = apply_N(f, params, window)
    eps_f = eps * f.values
    base_notes = [f"ratio bound C={C}, majorant-safe constant {consts.C}"]
    qp = params.q / (params.p - 1.0)
    minorant = eps_f + eps ** qp * nf.values
    x0_bound = consts.x0 * nf.values + eps_f

    u = np.zeros_like(f.values)
    c_k = 0.0
    monotone = True
    upper_ok = True
    lower_ok = True
    status = "max_iter"
    res = math.inf
    stall = 0
    notes = []
    k = 0
    while k < max_iter:
        k += 1
        u_new = apply_N(f.like(u), params, window).values + eps_f
        if np.any(u_new < u):
            monotone = False
        maj = c_k * nf.values + eps_f
        slack = 1e-12 * (1.0 + float(np.max(maj)))
        if np.any(u_new > maj + slack):
            upper_ok = False
        if k >= 2 and np.any(u_new < minorant - slack):
            lower_ok = False
        over = u_new > x0_bound * (1.0 + 1e-9) + slack
        if np.any(over):
            status = "diverged"
            notes.append("iterate exceeded x0*Nf + eps*f: C was underestimated")
            u = u_new
            break
        new_res = float(np.max(np.abs(u_new - u)))
        if new_res <= tol:
            u = u_new
            res = new_res
            status = "converged"
            break
        if res - new_res < 1e-15:
            stall += 1
            if stall >= 10:
                status = "stalled"
                notes.append("residual decrease < 1e-15 over 10 iterations")
                u = u_new
                res = new_res
                break
        else:
            stall = 0
        u = u_new
        res = new_res
        c_k = consts.majorant_map(c_k)

    cert = ConvergenceCertificate(
        iterations=k, sup_residual=res, monotone=monotone,
        lower_ok=lower_ok, upper_ok=upper_ok, majorant_coefficient=c_k,
        status=status, eps=eps, C=C, x0=consts.x0, window=win,
        notes=base_notes + notes)
    return f.like(u), cert
