"""Bound-state wave-functions: assembly, evaluation, normalization, residuals.

A bound state on a Koenigs space is a product

    Psi = N_N f^{-1/4} * (1-D factors) * (flat chart Jacobian factor)

where every 1-D factor is individually L^2-normalized in the flat measure, so
that with f == 1 the product is itself normalized and N_N == 1.  The charts:

    KI   : cartesian (three half-line oscillator factors),
           spherical (two trigonometric factors + radial oscillator, /(r sqrt sin th)),
           circular polar (trig factor + two oscillator factors, /sqrt rho)
    KII  : cartesian / circular polar; the z factor is a full-line oscillator
           of frequency omega_eff (the convention of the KII quantization
           condition, whose separation constants then sum to delta*E)
    KIII : spherical (trig factor + negative-order Legendre polar factor
           + hydrogen-type radial factor, /(r sqrt sin th))

The physical normalization is over the curved volume element:
int |Psi|^2 sqrt(g) d^3p = 1, i.e. N_N^{-2} = int |flat product|^2 f d^3p.
That integral is computed by tensor-product Gauss quadrature, written as a sum
of separable metric terms so each factor needs only 1-D weighted moments
(transformed Gauss-Laguerre radially, Gauss-Legendre for angles, Gauss-Hermite
for the full line), with node doubling until stabilization.

On the singular axes the states live in one octant/quadrant; evaluation at
mirrored coordinates returns the even mirror image.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import roots_genlaguerre, roots_hermite

from .errors import (
    AccuracyError,
    ChartError,
    ConfigError,
    DomainError,
    ParameterError,
)
from .spaces import Point3, SpaceKind, SpaceSpec, metric_factor
from .specialfn import (
    PolyParams,
    assoc_legendre_neg_order,
    gen_laguerre,
    hermite,
    log_gamma,
    poschl_teller_wf,
    radial_ho_wf,
)
from .spectra import (
    EffectiveIndices,
    EnergyLevel,
    Provenance,
    QuantumNumbers,
    Scheme,
    effective_indices,
    radial_reduction,
)


class Chart(str, Enum):
    CARTESIAN = "cartesian"
    SPHERICAL = "spherical"
    CIRCULAR_POLAR = "circular_polar"


_SUPPORTED_CHARTS = {
    SpaceKind.KI: {Chart.CARTESIAN: Scheme.CARTESIAN,
                   Chart.SPHERICAL: Scheme.POLAR,
                   Chart.CIRCULAR_POLAR: Scheme.POLAR},
    SpaceKind.KII: {Chart.CARTESIAN: Scheme.CARTESIAN,
                    Chart.CIRCULAR_POLAR: Scheme.POLAR},
    SpaceKind.KIII: {Chart.SPHERICAL: Scheme.COULOMB},
}


@dataclass(frozen=True)
class QuadratureConfig:
    base_nodes: int = 64
    max_nodes: int = 4096          # hard cap per axis
    target_rel: float = 1e-8       # node-doubling stabilization criterion
    accuracy_limit: float = 1e-6   # error estimate above this is a failure

    def __post_init__(self):
        if self.base_nodes < 2 or self.max_nodes < self.base_nodes:
            raise ConfigError("need 2 <= base_nodes <= max_nodes")


@dataclass
class BoundState:
    """A solved level with frozen energy-dependent indices.

    ``norm_const`` is None until :func:`normalize` runs; evaluation then treats
    it as 1.  ``coulomb_scale`` is the KIII length a = hbar^2/(m alpha_eff).
    Immutable by convention once normalized.
    """

    space: SpaceSpec
    level: EnergyLevel
    chart: Chart
    indices: EffectiveIndices
    coulomb_scale: float | None = None
    norm_const: float | None = None
    norm_error: float | None = None

    @property
    def energy(self) -> float:
        return self.level.energy


def assemble(spec: SpaceSpec, level: EnergyLevel, chart) -> BoundState:
    """Freeze the energy-dependent indices of a solved level into a state."""
    chart = Chart(chart)
    charts = _SUPPORTED_CHARTS.get(spec.kind)
    if charts is None or chart not in charts:
        supported = sorted(c.value for c in charts) if charts else []
        raise ChartError(f"chart {chart.value!r} unsupported for {spec.kind.value}; "
                         f"supported: {supported}")
    if level.qn.scheme is not charts[chart]:
        raise ChartError(f"{chart.value} chart expects {charts[chart].value!r} "
                         f"labels, level has {level.qn.scheme.value!r}")
    if level.provenance is Provenance.ORACLE:
        raise ParameterError("oracle levels are for verification only; "
                             "assemble from a solver or closed-form level")
    idx = effective_indices(spec, level.qn, level.energy, level.branch_signs)
    if not idx.all_real:
        raise ParameterError(f"cannot assemble: an effective index is imaginary "
                             f"at E = {level.energy}")
    scale = None
    if spec.kind is SpaceKind.KIII:
        if idx.kappa is None:
            raise ParameterError("cannot assemble: kappa undefined (delta*E >= 0)")
        if idx.alpha_eff <= 0.0:
            raise ParameterError("cannot assemble: alpha_eff <= 0 at this energy")
        scale = spec.units.hbar ** 2 / (spec.units.mass * idx.alpha_eff)
    return BoundState(spec, level, chart, idx, coulomb_scale=scale)


# ---------------------------------------------------------------------------
# component factors
# ---------------------------------------------------------------------------

def _ho_line_wf(n: int, omega: float, z, units):
    """Normalized full-line oscillator eigenfunction (Hermite basis)."""
    nu = units.mass * omega / units.hbar
    t = math.sqrt(nu) * np.asarray(z, dtype=float)
    ln_pref = 0.25 * math.log(nu / math.pi) - 0.5 * (n * math.log(2.0)
                                                     + log_gamma(n + 1.0))
    val = np.exp(ln_pref - 0.5 * t * t) * hermite(n, t)
    return val if np.ndim(val) else float(val)


def _coulomb_q(state: BoundState) -> float:
    spec = state.space
    de = spec.metric["delta"] * state.energy
    return math.sqrt(-2.0 * spec.units.mass * de) / spec.units.hbar


def _coulomb_radial(n: int, lam2: float, q: float, r):
    """Normalized hydrogen-type reduced radial function on (0, inf).

    u(r) = C (2qr)^(lam2+1/2) e^{-qr} L_n^{(2 lam2)}(2qr),
    C = [2q n! / ((2n+2 lam2+1) Gamma(n+2 lam2+1))]^{1/2};  int u^2 dr = 1.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise DomainError("r must be strictly positive")
    ln_c = 0.5 * (math.log(2.0 * q) + log_gamma(n + 1.0)
                  - math.log(2.0 * n + 2.0 * lam2 + 1.0)
                  - log_gamma(n + 2.0 * lam2 + 1.0))
    t = 2.0 * q * r
    val = np.exp(ln_c + (lam2 + 0.5) * np.log(t) - 0.5 * t) \
        * gen_laguerre(PolyParams(n, 2.0 * lam2), t)
    return val if np.ndim(val) else float(val)


def _legendre_polar(l: int, mu: float, theta):
    """Normalized polar factor (sin th)^(1/2) c_l P_{mu+l}^{-mu}(cos th) on (0, pi)."""
    theta = np.asarray(theta, dtype=float)
    ln_c = 0.5 * (math.log(2.0 * mu + 2.0 * l + 1.0) + log_gamma(l + 2.0 * mu + 1.0)
                  - math.log(2.0) - log_gamma(l + 1.0))
    val = (math.exp(ln_c) * np.sqrt(np.sin(theta))
           * assoc_legendre_neg_order(l, mu, np.cos(theta)))
    return val if np.ndim(val) else float(val)


def _flat_product(state: BoundState, coords) -> float:
    """The flat-measure-normalized product (without f^{-1/4} and N_N)."""
    spec, qn, idx = state.space, state.level.qn, state.indices
    units = spec.units
    kind, chart = spec.kind, state.chart

    if kind is SpaceKind.KI:
        kx, ky, kz = idx.k_eff
        if chart is Chart.CARTESIAN:
            x, y, z = coords
            return (radial_ho_wf(qn.n_x, kx, idx.omega_eff, x, units)
                    * radial_ho_wf(qn.n_y, ky, idx.omega_eff, y, units)
                    * radial_ho_wf(qn.n_z, kz, idx.omega_eff, z, units))
        if chart is Chart.SPHERICAL:
            r, th, ph = coords
            return (poschl_teller_wf(qn.n_phi, ky, kx, ph)
                    * poschl_teller_wf(qn.n_theta, idx.lambda1, kz, th)
                    * radial_ho_wf(qn.n_r, idx.lambda2, idx.omega_eff, r, units)
                    / (r * math.sqrt(math.sin(th))))
        rho, ph, z = coords
        return (poschl_teller_wf(qn.n_phi, ky, kx, ph)
                * radial_ho_wf(qn.n_r, idx.lambda1, idx.omega_eff, rho, units)
                * radial_ho_wf(qn.n_theta, kz, idx.omega_eff, z, units)
                / math.sqrt(rho))

    if kind is SpaceKind.KII:
        kx, ky = idx.k_eff
        if chart is Chart.CARTESIAN:
            x, y, z = coords
            return (radial_ho_wf(qn.n_x, kx, idx.omega_eff, x, units)
                    * radial_ho_wf(qn.n_y, ky, idx.omega_eff, y, units)
                    * _ho_line_wf(qn.n_z, idx.omega_eff, z, units))
        rho, ph, z = coords
        return (poschl_teller_wf(qn.n_phi, ky, kx, ph)
                * radial_ho_wf(qn.n_r, idx.lambda1, idx.omega_eff, rho, units)
                * _ho_line_wf(qn.n_theta, idx.omega_eff, z, units)
                / math.sqrt(rho))

    # KIII spherical
    r, th, ph = coords
    s1, s2, _ = idx.branch_signs
    k1, k2 = idx.k_eff
    q = _coulomb_q(state)
    return (poschl_teller_wf(qn.n_phi, s2 * k2, s1 * k1, ph)
            * _legendre_polar(qn.l, idx.lambda1, th) / math.sqrt(math.sin(th))
            * _coulomb_radial(qn.n_r, idx.lambda2, q, r) / r)


def _to_chart(state: BoundState, p):
    """Chart coordinates of p (a Point3 is converted; a bare triple is taken
    as chart coordinates).  Mirrors into the octant/quadrant of the state."""
    chart = state.chart
    if isinstance(p, Point3):
        x, y, z = p
        if chart is Chart.CARTESIAN:
            fullline_z = state.space.kind is SpaceKind.KII
            return (abs(x), abs(y), z if fullline_z else abs(z))
        if chart is Chart.SPHERICAL:
            r = math.sqrt(x * x + y * y + z * z)
            zz = z if state.space.kind is SpaceKind.KIII else abs(z)
            th = math.acos(min(1.0, max(-1.0, zz / r))) if r > 0 else 0.0
            ph = math.atan2(abs(y), abs(x))
            return (r, th, ph)
        rho = math.hypot(x, y)
        ph = math.atan2(abs(y), abs(x))
        zz = z if state.space.kind is SpaceKind.KII else abs(z)
        return (rho, ph, zz)
    coords = tuple(float(v) for v in p)
    if len(coords) != 3:
        raise DomainError(f"expected three coordinates, got {p!r}")
    return coords


def _chart_to_cartesian(state: BoundState, coords) -> Point3:
    chart = state.chart
    if chart is Chart.CARTESIAN:
        return Point3(*coords)
    if chart is Chart.SPHERICAL:
        r, th, ph = coords
        return Point3(r * math.sin(th) * math.cos(ph),
                      r * math.sin(th) * math.sin(ph),
                      r * math.cos(th))
    rho, ph, z = coords
    return Point3(rho * math.cos(ph), rho * math.sin(ph), z)


def evaluate(state: BoundState, p) -> float:
    """Psi at p: the component product times f^{-1/4} and the norm constant."""
    coords = _to_chart(state, p)
    cart = _chart_to_cartesian(state, coords)
    f = metric_factor(state.space, cart)
    norm = state.norm_const if state.norm_const is not None else 1.0
    return norm * f ** -0.25 * _flat_product(state, coords)


# ---------------------------------------------------------------------------
# normalization quadrature
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=512)
def _genlaguerre_rule(n: int, alpha: float):
    return roots_genlaguerre(n, alpha)


@functools.lru_cache(maxsize=64)
def _hermite_rule(n: int):
    return roots_hermite(n)


@functools.lru_cache(maxsize=64)
def _legendre_rule(n: int):
    return np.polynomial.legendre.leggauss(n)


def _osc_moment(n: int, lam: float, nu: float, power: int, nodes: int) -> float:
    """int_0^inf psi_{n,lam,nu}(r)^2 r^power dr (exact Gauss-Laguerre)."""
    alpha = lam + 0.5 * power
    if alpha <= -1.0:
        raise AccuracyError(f"radial moment diverges (exponent {alpha} <= -1)")
    t, w = _genlaguerre_rule(nodes, alpha)
    s = float(np.sum(w * gen_laguerre(PolyParams(n, lam), t) ** 2))
    return math.exp(log_gamma(n + 1.0) - log_gamma(n + lam + 1.0)
                    - 0.5 * power * math.log(nu)) * s


def _coulomb_moment(n: int, lam2: float, q: float, power: int, nodes: int) -> float:
    """int_0^inf u(r)^2 r^power dr for the hydrogen-type radial factor."""
    alpha = 2.0 * lam2 + 1.0 + power
    if alpha <= -1.0:
        raise AccuracyError(f"radial moment diverges (exponent {alpha} <= -1)")
    t, w = _genlaguerre_rule(nodes, alpha)
    s = float(np.sum(w * gen_laguerre(PolyParams(n, 2.0 * lam2), t) ** 2))
    return ((2.0 * q) ** -power * s
            * math.exp(log_gamma(n + 1.0) - math.log(2.0 * n + 2.0 * lam2 + 1.0)
                       - log_gamma(n + 2.0 * lam2 + 1.0)))


def _ho_moment(n: int, nu: float, power: int, nodes: int) -> float:
    """int_-inf^inf psi_HO^2 z^power dz (exact Gauss-Hermite; power even)."""
    t, w = _hermite_rule(max(nodes, n + power // 2 + 1))
    s = float(np.sum(w * hermite(n, t) ** 2 * t ** power))
    return (nu ** (-0.5 * power) * s
            * math.exp(-0.5 * math.log(math.pi) - n * math.log(2.0)
                       - log_gamma(n + 1.0)))


_W_ONE, _W_INV_SIN2, _W_INV_COS2 = "one", "inv_sin2", "inv_cos2"


def _angular_weight(name: str, t: np.ndarray) -> np.ndarray:
    if name == _W_ONE:
        return np.ones_like(t)
    if name == _W_INV_SIN2:
        return np.sin(t) ** -2
    return np.cos(t) ** -2


def _pt_moment(n: int, a: float, b: float, weight: str, nodes: int) -> float:
    """int_0^{pi/2} Phi_n^{(a,b)}(t)^2 w(t) dt by Gauss-Legendre."""
    x, w = _legendre_rule(nodes)
    t = (x + 1.0) * (math.pi / 4.0)
    vals = poschl_teller_wf(n, a, b, t) ** 2 * _angular_weight(weight, t)
    return float(np.sum(w * vals) * math.pi / 4.0)


def _legendre_moment(l: int, mu: float, weight: str, nodes: int) -> float:
    """int_0^pi polar-factor^2 w(t) dt by Gauss-Legendre."""
    x, w = _legendre_rule(nodes)
    t = (x + 1.0) * (math.pi / 2.0)
    vals = _legendre_polar(l, mu, t) ** 2 * _angular_weight(weight, t)
    return float(np.sum(w * vals) * math.pi / 2.0)


def _metric_terms(state: BoundState):
    """The f-weighted norm integral as sum of separable per-axis moments.

    Returns a list of (coefficient, (axis-moment spec, ...)) where each axis
    moment is a callable of the node count.
    """
    spec, qn, idx = state.space, state.level.qn, state.indices
    units = spec.units
    met = spec.metric
    kind, chart = spec.kind, state.chart
    nu = units.mass * idx.omega_eff / units.hbar if idx.omega_eff else None

    def osc(n, lam, power):
        return lambda nodes: _osc_moment(n, lam, nu, power, nodes)

    def ho(n, power):
        return lambda nodes: _ho_moment(n, nu, power, nodes)

    def pt(n, a, b, weight):
        return lambda nodes: _pt_moment(n, a, b, weight, nodes)

    one = lambda nodes: 1.0

    if kind is SpaceKind.KI:
        kx, ky, kz = idx.k_eff
        if chart is Chart.CARTESIAN:
            ax = [(qn.n_x, kx), (qn.n_y, ky), (qn.n_z, kz)]
            terms = [(met["delta"], (one,))]
            for a in range(3):
                if met["alpha"]:
                    terms.append((met["alpha"], (osc(*ax[a], 2),)))
                beta = met[f"beta_{'xyz'[a]}"]
                if beta:
                    terms.append((beta, (osc(*ax[a], -2),)))
            return terms
        if chart is Chart.SPHERICAL:
            r2 = osc(qn.n_r, idx.lambda2, 2)
            rm2 = osc(qn.n_r, idx.lambda2, -2)
            th1 = pt(qn.n_theta, idx.lambda1, kz, _W_INV_SIN2)
            th2 = pt(qn.n_theta, idx.lambda1, kz, _W_INV_COS2)
            ph_c = pt(qn.n_phi, ky, kx, _W_INV_COS2)
            ph_s = pt(qn.n_phi, ky, kx, _W_INV_SIN2)
            terms = [(met["delta"], (one,))]
            if met["alpha"]:
                terms.append((met["alpha"], (r2,)))
            if met["beta_x"]:
                terms.append((met["beta_x"], (rm2, th1, ph_c)))
            if met["beta_y"]:
                terms.append((met["beta_y"], (rm2, th1, ph_s)))
            if met["beta_z"]:
                terms.append((met["beta_z"], (rm2, th2)))
            return terms
        # circular polar
        rho2 = osc(qn.n_r, idx.lambda1, 2)
        rhom2 = osc(qn.n_r, idx.lambda1, -2)
        z2 = osc(qn.n_theta, kz, 2)
        zm2 = osc(qn.n_theta, kz, -2)
        ph_c = pt(qn.n_phi, ky, kx, _W_INV_COS2)
        ph_s = pt(qn.n_phi, ky, kx, _W_INV_SIN2)
        terms = [(met["delta"], (one,))]
        if met["alpha"]:
            terms.append((met["alpha"], (rho2,)))
            terms.append((met["alpha"], (z2,)))
        if met["beta_x"]:
            terms.append((met["beta_x"], (rhom2, ph_c)))
        if met["beta_y"]:
            terms.append((met["beta_y"], (rhom2, ph_s)))
        if met["beta_z"]:
            terms.append((met["beta_z"], (zm2,)))
        return terms

    if kind is SpaceKind.KII:
        kx, ky = idx.k_eff
        terms = [(met["delta"], (one,))]
        if chart is Chart.CARTESIAN:
            if met["alpha"]:
                terms.append((met["alpha"], (osc(qn.n_x, kx, 2),)))
                terms.append((met["alpha"], (osc(qn.n_y, ky, 2),)))
                terms.append((4.0 * met["alpha"], (ho(qn.n_z, 2),)))
            if met["beta_x"]:
                terms.append((met["beta_x"], (osc(qn.n_x, kx, -2),)))
            if met["beta_y"]:
                terms.append((met["beta_y"], (osc(qn.n_y, ky, -2),)))
            return terms
        rho2 = osc(qn.n_r, idx.lambda1, 2)
        rhom2 = osc(qn.n_r, idx.lambda1, -2)
        if met["alpha"]:
            terms.append((met["alpha"], (rho2,)))
            terms.append((4.0 * met["alpha"], (ho(qn.n_theta, 2),)))
        if met["beta_x"]:
            terms.append((met["beta_x"], (rhom2, pt(qn.n_phi, ky, kx, _W_INV_COS2))))
        if met["beta_y"]:
            terms.append((met["beta_y"], (rhom2, pt(qn.n_phi, ky, kx, _W_INV_SIN2))))
        return terms

    # KIII spherical
    s1, s2, _ = idx.branch_signs
    k1, k2 = idx.k_eff
    q = _coulomb_q(state)

    def coul(power):
        return lambda nodes: _coulomb_moment(qn.n_r, idx.lambda2, q, power, nodes)

    def leg(weight):
        return lambda nodes: _legendre_moment(qn.l, idx.lambda1, weight, nodes)

    terms = [(met["delta"], (one,))]
    if met["alpha1"]:
        terms.append((-met["alpha1"], (coul(-1),)))
    if met["beta"]:
        terms.append((met["beta"], (coul(-2), leg(_W_INV_SIN2),
                                    pt(qn.n_phi, s2 * k2, s1 * k1, _W_INV_COS2))))
    if met["gamma"]:
        terms.append((met["gamma"], (coul(-2), leg(_W_INV_SIN2),
                                     pt(qn.n_phi, s2 * k2, s1 * k1, _W_INV_SIN2))))
    return terms


def _norm_integral(state: BoundState, nodes: int) -> float:
    total = 0.0
    for coef, moments in _metric_terms(state):
        if coef == 0.0:
            continue
        prod = coef
        for mom in moments:
            prod *= mom(nodes)
        total += prod
    return total


def normalize(spec: SpaceSpec, state: BoundState,
              quad_cfg: QuadratureConfig | None = None) -> float:
    """Compute and store N_N so that int |Psi|^2 sqrt(g) d^3p = 1.

    Node counts double until successive estimates agree to ``target_rel`` (or
    the per-axis cap); an error estimate above ``accuracy_limit`` raises.
    """
    if spec != state.space:
        raise ParameterError("state was assembled for a different space spec")
    cfg = quad_cfg or QuadratureConfig()
    nodes = cfg.base_nodes
    prev = _norm_integral(state, nodes)
    err = math.inf
    while nodes * 2 <= cfg.max_nodes:
        nodes *= 2
        cur = _norm_integral(state, nodes)
        err = abs(cur - prev) / max(abs(cur), 1e-300)
        prev = cur
        if err <= cfg.target_rel:
            break
    if err > cfg.accuracy_limit:
        raise AccuracyError(f"normalization quadrature did not converge "
                            f"(estimate {err:g} at {nodes} nodes)")
    if prev <= 0.0:
        raise AccuracyError(f"norm integral not positive ({prev}); "
                            "metric is not positive on the state's support")
    state.norm_const = 1.0 / math.sqrt(prev)
    state.norm_error = err
    return state.norm_const


# ---------------------------------------------------------------------------
# radial eigen-residual
# ---------------------------------------------------------------------------

def _reduced_potential(state: BoundState, family: str, lam: float, r: np.ndarray):
    spec = state.space
    hbar, m = spec.units.hbar, spec.units.mass
    centrifugal = hbar ** 2 * (lam * lam - 0.25) / (2.0 * m * r * r)
    if family == "oscillator":
        return 0.5 * m * state.indices.omega_eff ** 2 * r * r + centrifugal
    return -state.indices.alpha_eff / r + centrifugal


def _default_grid(state: BoundState, family: str, lam: float, n_red: int):
    spec = state.space
    hbar, m = spec.units.hbar, spec.units.mass
    de = spec.metric["delta"] * state.energy
    if family == "oscillator":
        om = state.indices.omega_eff
        r_turn = math.sqrt(2.0 * abs(de) / m) / om
        return np.linspace(0.05 * r_turn, 1.6 * r_turn, 4001)
    q = _coulomb_q(state)
    kappa = n_red + lam + 0.5
    r_out = 2.5 * kappa / q
    return np.linspace(0.02 * r_out, r_out, 4001)


def ode_residual(spec: SpaceSpec, state: BoundState, sample=None) -> float:
    """Relative L2 residual of the reduced radial problem at the solved energy.

    The quantization condition makes the reduced radial factor (label n, index
    lambda2) an eigenfunction of

        -hbar^2/2m u'' + U_eff(r; E) u = delta*E u

    with U_eff the transformed oscillator or Coulomb potential.  Second
    derivatives by central differences on the sample grid.
    """
    if spec != state.space:
        raise ParameterError("state was assembled for a different space spec")
    family, n_red, lam = radial_reduction(spec, state.level.qn, state.indices)
    r = np.asarray(sample, dtype=float) if sample is not None \
        else _default_grid(state, family, lam, n_red)
    if r.ndim != 1 or r.size < 16:
        raise ConfigError("sample grid must be a 1-D array of >= 16 points")
    h = np.diff(r)
    if not np.allclose(h, h[0], rtol=1e-9):
        raise ConfigError("sample grid must be uniform")
    h = float(h[0])
    if family == "oscillator":
        scale = math.sqrt(spec.units.hbar / (spec.units.mass * state.indices.omega_eff))
        u = radial_ho_wf(n_red, lam, state.indices.omega_eff, r, spec.units)
    else:
        scale = 1.0 / _coulomb_q(state)
        u = _coulomb_radial(n_red, lam, _coulomb_q(state), r)
    if h > 1e-2 * scale:
        raise ConfigError(f"grid too coarse: step {h:g} exceeds 1e-2 of the "
                          f"state's length scale {scale:g}")
    de = spec.metric["delta"] * state.energy
    hbar, m = spec.units.hbar, spec.units.mass
    upp = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / h ** 2
    mid = slice(1, -1)
    res = (-hbar ** 2 / (2.0 * m) * upp
           + _reduced_potential(state, family, lam, r[mid]) * u[mid]
           - de * u[mid])
    return float(np.linalg.norm(res) / (abs(de) * np.linalg.norm(u[mid])))


def radial_node_count(state: BoundState, n_scan: int = 4000) -> int:
    """Sign changes of the reduced radial factor on (0, inf)."""
    family, n_red, lam = radial_reduction(state.space, state.level.qn, state.indices)
    r = _default_grid(state, family, lam, n_red)
    r = np.linspace(r[0] * 0.2, r[-1] * 1.3, n_scan)
    if family == "oscillator":
        u = radial_ho_wf(n_red, lam, state.indices.omega_eff, r, state.space.units)
    else:
        u = _coulomb_radial(n_red, lam, _coulomb_q(state), r)
    u = u[np.abs(u) > 1e-12 * np.max(np.abs(u))]
    return int(np.sum(np.sign(u[:-1]) != np.sign(u[1:])))
