"""One-dimensional component wave-functions and their orthogonal polynomials.

All bound states of the package are assembled from the functions here:
trigonometric two-singularity (Poeschl-Teller) eigenfunctions built on Jacobi
polynomials, half-line radial oscillator eigenfunctions built on generalized
Laguerre polynomials, Hermite polynomials for the full-line oscillator, and
associated Legendre functions of negative order for the polar factor of the
Coulomb-type space.

Polynomials are evaluated by forward three-term recurrence (stable on the
orthogonality interval), normalization prefactors in log space through
``log_gamma``.  Every function is pure; scalar or ndarray arguments are
accepted where the argument is the evaluation point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError
from .spaces import NATURAL_UNITS, UnitScalars

# Forward recurrences drift past this degree; desk-scale spectra stay below ~50.
MAX_DEGREE = 500


@dataclass(frozen=True)
class PolyParams:
    """Degree and upper indices of P_n^(alpha,beta) or L_n^(alpha)."""

    degree: int
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if self.degree < 0:
            raise DomainError(f"degree must be >= 0, got {self.degree}")
        if self.degree > MAX_DEGREE:
            raise DomainError(f"degree {self.degree} exceeds cap {MAX_DEGREE}")


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def jacobi_poly(p: PolyParams, x):
    """P_n^(alpha,beta)(x) by the standard three-term recurrence."""
    n, a, b = p.degree, p.alpha, p.beta
    x = np.asarray(x, dtype=float)
    if n == 0:
        out = np.ones_like(x)
        return out if out.ndim else float(out)
    prev = np.ones_like(x)
    cur = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x
    for k in range(2, n + 1):
        c1 = 2.0 * k * (k + a + b) * (2.0 * k + a + b - 2.0)
        c2 = (2.0 * k + a + b - 1.0) * ((2.0 * k + a + b) * (2.0 * k + a + b - 2.0) * x
                                        + a * a - b * b)
        c3 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * (2.0 * k + a + b)
        prev, cur = cur, (c2 * cur - c3 * prev) / c1
    return cur if cur.ndim else float(cur)


def gen_laguerre(p: PolyParams, x):
    """L_n^(alpha)(x) by three-term recurrence (p.alpha is the Laguerre order)."""
    n, lam = p.degree, p.alpha
    x = np.asarray(x, dtype=float)
    if n == 0:
        out = np.ones_like(x)
        return out if out.ndim else float(out)
    prev = np.ones_like(x)
    cur = 1.0 + lam - x
    for k in range(2, n + 1):
        prev, cur = cur, ((2.0 * k - 1.0 + lam - x) * cur
                          - (k - 1.0 + lam) * prev) / k
    return cur if cur.ndim else float(cur)


def hermite(n: int, x):
    """Physicists' Hermite polynomial H_n(x)."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if n > MAX_DEGREE:
        raise DomainError(f"n = {n} exceeds cap {MAX_DEGREE}")
    x = np.asarray(x, dtype=float)
    if n == 0:
        out = np.ones_like(x)
        return out if out.ndim else float(out)
    prev = np.ones_like(x)
    cur = 2.0 * x
    for k in range(2, n + 1):
        prev, cur = cur, 2.0 * x * cur - 2.0 * (k - 1.0) * prev
    return cur if cur.ndim else float(cur)


def _gegenbauer(n: int, eta: float, x):
    """C_n^(eta)(x) by three-term recurrence (eta > 0)."""
    x = np.asarray(x, dtype=float)
    if n == 0:
        out = np.ones_like(x)
        return out if out.ndim else float(out)
    prev = np.ones_like(x)
    cur = 2.0 * eta * x
    for k in range(2, n + 1):
        prev, cur = cur, (2.0 * (k + eta - 1.0) * x * cur
                          - (k + 2.0 * eta - 2.0) * prev) / k
    return cur if cur.ndim else float(cur)


def poschl_teller_wf(n: int, alpha: float, beta: float, x):
    """Normalized trigonometric two-singularity eigenfunction on (0, pi/2).

    Phi_n^(a,b)(x) = [2(a+b+2n+1) n! G(a+b+n+1) / (G(a+n+1) G(b+n+1))]^(1/2)
                     (sin x)^(a+1/2) (cos x)^(b+1/2) P_n^(a,b)(cos 2x)

    with unit L^2 norm on (0, pi/2).  Eigenvalue of the associated 1-D problem
    is (2n + a + b + 1)^2 in units of hbar^2/2m.
    """
    if alpha <= -1.0 or beta <= -1.0:
        raise ParameterError(
            f"indices must exceed -1 for a normalizable state, got ({alpha}, {beta})")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0) or np.any(x >= math.pi / 2.0):
        raise DomainError("argument must lie strictly inside (0, pi/2)")
    ln_pref = 0.5 * (math.log(2.0 * (alpha + beta + 2.0 * n + 1.0))
                     + log_gamma(n + 1.0) + log_gamma(alpha + beta + n + 1.0)
                     - log_gamma(alpha + n + 1.0) - log_gamma(beta + n + 1.0))
    val = (math.exp(ln_pref)
           * np.sin(x) ** (alpha + 0.5) * np.cos(x) ** (beta + 0.5)
           * jacobi_poly(PolyParams(n, alpha, beta), np.cos(2.0 * x)))
    return val if np.ndim(val) else float(val)


def radial_ho_wf(n: int, lam: float, omega: float, r,
                 units: UnitScalars = NATURAL_UNITS):
    """Normalized half-line radial oscillator eigenfunction.

    psi_n(r) = [2 nu^(lam+1) n! / G(n+lam+1)]^(1/2)
               r^(lam+1/2) exp(-nu r^2/2) L_n^(lam)(nu r^2),   nu = m omega / hbar

    with unit L^2 norm on (0, inf), measure dr; eigenvalue hbar omega (2n+lam+1)
    of  -hbar^2/2m d^2/dr^2 + m omega^2 r^2/2 + hbar^2 (lam^2-1/4)/(2 m r^2).
    """
    if lam <= -1.0:
        raise ParameterError(f"lam must exceed -1, got {lam}")
    if not omega > 0.0:
        raise ParameterError(f"omega must be positive, got {omega}")
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise DomainError("r must be strictly positive")
    nu = units.mass * omega / units.hbar
    ln_pref = 0.5 * (math.log(2.0) + (lam + 1.0) * math.log(nu)
                     + log_gamma(n + 1.0) - log_gamma(n + lam + 1.0))
    t = nu * r * r
    val = (np.exp(ln_pref + (lam + 0.5) * np.log(r) - 0.5 * t)
           * gen_laguerre(PolyParams(n, lam), t))
    return val if np.ndim(val) else float(val)


def assoc_legendre_neg_order(l: int, mu: float, x):
    """P_{mu+l}^{-mu}(x) for mu > -1/2, |x| < 1, via the Gegenbauer reduction

    P_{mu+l}^{-mu}(cos t) = (sin t)^mu / (2^mu G(mu+1))
                            * [l! G(2mu+1) / G(l+2mu+1)] * C_l^(mu+1/2)(cos t).

    Only degree = order + integer is ever needed here, so the generic Legendre
    machinery is avoided.
    """
    if l < 0:
        raise DomainError(f"l must be >= 0, got {l}")
    if l > MAX_DEGREE:
        raise DomainError(f"l = {l} exceeds cap {MAX_DEGREE}")
    if mu <= -0.5:
        raise ParameterError(f"mu must exceed -1/2, got {mu}")
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) >= 1.0):
        raise DomainError("argument must lie strictly inside (-1, 1)")
    ln_ratio = log_gamma(l + 1.0) + log_gamma(2.0 * mu + 1.0) - log_gamma(l + 2.0 * mu + 1.0)
    pref = math.exp(ln_ratio - mu * math.log(2.0) - log_gamma(mu + 1.0))
    val = pref * (1.0 - x * x) ** (mu / 2.0) * _gegenbauer(l, mu + 0.5, x)
    return val if np.ndim(val) else float(val)
