"""Exponent bundles and the closed-form constants of the fixed-point scheme.

Everything downstream is parameterized by the quadruple (n, alpha, p, q):
space dimension, potential order, nonlinearity index, and source exponent.
The k-Hessian theory embeds through alpha = 2k/(k+1), p = k+1.
"""

import math
from dataclasses import dataclass, field


class RegimeError(ValueError):
    """Raised when a parameter set violates a required inequality."""


@dataclass(frozen=True)
class Params:
    """Validated exponent bundle.

    ``local_only`` is set when alpha*p >= n; such parameters may be used for
    truncated (finite-radius) evaluations but global (r = infinity)
    operations refuse them.
    """

    n: int
    alpha: float
    p: float
    q: float
    p_prime: float
    kind: str            # "quasilinear" or "hessian"
    k: int | None = None
    local_only: bool = False

    def wolff_beta(self, order: float | None = None) -> float:
        """Kernel decay exponent (n - order)/(p - 1); order defaults to alpha*p."""
        if order is None:
            order = self.alpha * self.p
        return (self.n - order) / (self.p - 1.0)

    @property
    def growth_exponent(self) -> float:
        """n - p*q/(q - p + 1), the Frostman/capacity scaling exponent."""
        return self.n - self.p * self.q / (self.q - self.p + 1.0)

    @property
    def growth_critical_q(self) -> float:
        """q below (or at) which no nonzero measure passes the global tests.

        Equals n(p-1)/(n - alpha*p); reduces to n(p-1)/(n-p) for alpha = 1
        and to nk/(n-2k) for the Hessian embedding.
        """
        if self.alpha * self.p >= self.n:
            return math.inf
        return self.n * (self.p - 1.0) / (self.n - self.alpha * self.p)


def make_params(n, alpha, p, q, kind="quasilinear", k=None):
    """Validate and return a Params bundle.

    Raises RegimeError naming the violated inequality.  alpha*p >= n is not
    an error: the bundle is flagged local-only.
    """
    n = int(n)
    alpha = float(alpha)
    p = float(p)
    q = float(q)
    # n = 1 is admitted for the discrete solver instances
    if n < 1:
        raise RegimeError(f"n >= 1 required, got n={n}")
    if alpha <= 0:
        raise RegimeError(f"alpha > 0 required, got alpha={alpha}")
    if p <= 1:
        raise RegimeError(f"p <= 1 (p > 1 required, got p={p})")
    if q <= p - 1:
        raise RegimeError(f"q <= p-1 (q > p-1 required, got q={q}, p-1={p - 1})")
    return Params(
        n=n,
        alpha=alpha,
        p=p,
        q=q,
        p_prime=p / (p - 1.0),
        kind=kind,
        k=k,
        local_only=(alpha * p >= n),
    )


def hessian_params(n, k, q):
    """Params for the k-Hessian embedding: alpha = 2k/(k+1), p = k+1.

    Requires 1 <= k <= n and q > k.  Global use additionally needs k < n/2,
    otherwise the bundle is flagged local-only (alpha*p = 2k >= n).
    """
    n = int(n)
    k = int(k)
    if not (1 <= k <= n):
        raise RegimeError(f"k out of range: need 1 <= k <= n, got k={k}, n={n}")
    q = float(q)
    if q <= k:
        raise RegimeError(f"q <= k (q > k required, got q={q}, k={k})")
    return make_params(n, 2.0 * k / (k + 1.0), k + 1.0, q, kind="hessian", k=k)


def critical_exponents(params):
    """The two critical exponents (q_star, q_star_star).

    Quasilinear: q_star = n(p-1)/(n-p), q_star_star = (n(p-1)+p)/(n-p),
    requiring p < n.  Hessian: q_star = nk/(n-2k) with no second exponent,
    requiring k < n/2.  Outside these regimes there is no critical exponent
    (Liouville regime) and a RegimeError is raised.
    """
    n, p = params.n, params.p
    if params.kind == "hessian":
        k = params.k
        if k >= n / 2.0:
            raise RegimeError(
                f"no critical exponent; Liouville regime (k={k} >= n/2={n / 2.0})")
        return n * k / (n - 2.0 * k), None
    if p >= n:
        raise RegimeError(
            f"no critical exponent; Liouville regime (p={p} >= n={n})")
    return n * (p - 1.0) / (n - p), (n * (p - 1.0) + p) / (n - p)


def subadditivity_constant(p):
    """c(p) = max(1, 2^(p'-2)), the splitting constant of the scheme."""
    p_prime = p / (p - 1.0)
    return max(1.0, 2.0 ** (p_prime - 2.0))


@dataclass(frozen=True)
class IterationConstants:
    """Closed-form constants of the Picard scheme for a given ratio bound C.

    eps is critical: the majorant map

        psi(x) = [eps^(1/(p-1)) * cp * (1 + C^(1/q) * x^(p'-1))]^q

    is tangent to the identity at x0, so the coefficient sequence
    c_1 = 0, c_k = psi(c_{k-1}) increases to x0.  ``unconstrained`` marks the
    degenerate C = 0 case (eps is a +inf sentinel; the solver handles the
    zero-measure source separately).
    """

    p: float
    q: float
    C: float
    cp: float
    eps: float
    x0: float
    unconstrained: bool = False
    # eps^(1/(p-1)) * cp, precomputed in its numerically stable form
    _a: float = field(default=0.0, repr=False)

    def majorant_map(self, x):
        """One application of psi."""
        m = self.p / (self.p - 1.0) - 1.0     # p' - 1 = 1/(p-1)
        return (self._a * (1.0 + self.C ** (1.0 / self.q) * x ** m)) ** self.q

    def c_sequence(self, count):
        """First ``count`` majorant coefficients c_1 = 0, c_k = psi(c_{k-1})."""
        out = []
        c = 0.0
        for _ in range(count):
            out.append(c)
            c = self.majorant_map(c)
        return out

    def fixed_point_residual(self):
        """Relative residual of x0 in x = psi(x)."""
        return abs(self.majorant_map(self.x0) - self.x0) / self.x0


def iteration_constants(params, C):
    """Compute (eps, x0, c(p)) for pointwise-condition constant C >= 0.

    With beta = (p-1)/q and gamma = (q-p+1)/q the critical choice is

        eps^(1/(p-1)) * c(p) = gamma^gamma * beta^beta * C^(-beta/q),
        x0 = [beta / (gamma * C^(1/q))]^(p-1),

    the latter being algebraically equal to the exponent form
    [(q/(p-1)) * eps^(1/(p-1)) * c(p) * C^(1/q)]^(q(p-1)/(p-1-q)) but stable
    for q close to p-1.
    """
    p, q = params.p, params.q
    cp = subadditivity_constant(p)
    if C < 0:
        raise RegimeError(f"C >= 0 required, got C={C}")
    if C == 0.0:
        return IterationConstants(p=p, q=q, C=0.0, cp=cp, eps=math.inf,
                                  x0=0.0, unconstrained=True)
    beta = (p - 1.0) / q
    gamma = (q - p + 1.0) / q
    a = gamma ** gamma * beta ** beta * C ** (-beta / q)
    eps = (a / cp) ** (p - 1.0)
    x0 = (beta / (gamma * C ** (1.0 / q))) ** (p - 1.0)
    return IterationConstants(p=p, q=q, C=C, cp=cp, eps=eps, x0=x0, _a=a)


def majorant_safe_C(params, C_hat):
    """Smallest C whose coefficient sequence provably majorizes the Picard
    iterates when the true pointwise ratio bound is C_hat.

    One induction step bounds u_{k+1} by
    [c(p)(eps^(1/(p-1)) + C_hat^(1/q) c_k^(p'-1))]^q * Nf + eps*f, which is
    the majorant map of the effective constant C_hat / eps^(q/(p-1)); with
    eps = eps(C) that self-consistency condition C >= C_hat / eps(C)^(q/(p-1))
    solves to C = [C_hat (c(p)/(gamma^gamma beta^beta))^q]^(q/(q-p+1)).
    """
    if C_hat == 0.0:
        return 0.0
    p, q = params.p, params.q
    beta = (p - 1.0) / q
    gamma = (q - p + 1.0) / q
    cp = subadditivity_constant(p)
    return (C_hat * (cp / (gamma ** gamma * beta ** beta)) ** q) ** (1.0 / gamma)
