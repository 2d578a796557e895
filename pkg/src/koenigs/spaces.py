"""The five conformally-flat spaces and their quantum curvature corrections.

Each space carries a line element ds^2 = f(x,y,z)(dx^2+dy^2+dz^2) built from a
flat Hamiltonian divided by a superintegrable potential.  The five conformal
factors are

    KI   f = alpha (x^2+y^2+z^2) + beta_x/x^2 + beta_y/y^2 + beta_z/z^2 + delta
    KII  f = alpha (x^2+y^2+4z^2) + beta_x/x^2 + beta_y/y^2 + delta
    KIII f = -alpha1/r + beta/x^2 + gamma/y^2 + delta          (r^2 = x^2+y^2+z^2)
    KIV  f = (hbar^2/2m)(alpha x/(y^2 rho) + beta/y^2 + gamma/z^2) + delta
    KV   f = (hbar^2/2m)(alpha x/(y^2 rho) + beta/y^2) + gamma z + delta

with rho = sqrt(x^2+y^2).  For KIV/KV the hbar^2/2m prefactor of the bracketed
terms is absorbed here so that f carries consistent units across kinds.

Quantizing on such a space adds an hbar^2-order correction.  For the diagonal
metric g_ab = f_a^2 delta_ab (here f_a = sqrt(f) for every axis)

    DeltaV = hbar^2 (D-2)/(8m) * sum_a [ (D-4) f_{a,a}^2 + 2 f_a f_{a,aa} ] / f_a^4

with D = 3.  Rewriting f = h_a^2/x_a^2 per axis splits the correction into
DeltaV = DeltaV_1 + DeltaV_2 with

    DeltaV_{1,a} = hbar^2/(8m) (2 x^2 h h'' - 2 x h h' - x^2 h'^2) / h^4
    DeltaV_2     = 3 hbar^2/(8 m f) (1/x^2 + 1/y^2 + 1/z^2)

(' = d/dx_a).  DeltaV_1 is the piece subtracted through the effective
Lagrangian; DeltaV_2 is retained in the quantization.  DeltaV_2 is computed
uniformly from the h-identity over all three axes; for one-axis metrics
(e.g. f = 1/z^2, the three-dimensional hyperboloid) the per-axis totals of the
unused axes vanish so the single surviving summand gives DeltaV = 3 hbar^2/8m.

Analytic partial derivatives of f are the solve path; the central-difference
fallback is retained permanently as a test oracle (the per-axis DeltaV_1
algebra is the most error-prone code in the repository).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Mapping, NamedTuple

import numpy as np

from .errors import (
    ConfigError,
    KindError,
    NonPositiveMetricError,
    ParameterError,
    SingularPointError,
)

# Coordinates closer to an axis than this (in chart units) count as on-axis.
ON_AXIS_TOL = 1e-12

_AXES = ("x", "y", "z")


class SpaceKind(str, Enum):
    KI = "KI"
    KII = "KII"
    KIII = "KIII"
    KIV = "KIV"
    KV = "KV"


_METRIC_KEYS = {
    SpaceKind.KI: ("alpha", "beta_x", "beta_y", "beta_z", "delta"),
    SpaceKind.KII: ("alpha", "beta_x", "beta_y", "delta"),
    SpaceKind.KIII: ("alpha1", "beta", "gamma", "delta"),
    SpaceKind.KIV: ("alpha", "beta", "gamma", "delta"),
    SpaceKind.KV: ("alpha", "beta", "gamma", "delta"),
}

_POTENTIAL_KEYS = {
    SpaceKind.KI: ("omega", "k_x", "k_y", "k_z"),
    SpaceKind.KII: ("omega", "k_x", "k_y"),
    SpaceKind.KIII: ("alpha2", "k1", "k2"),
    SpaceKind.KIV: ("k1", "k2", "k3"),
    SpaceKind.KV: ("k1", "k2", "k3"),
}


@dataclass(frozen=True)
class UnitScalars:
    """hbar and the particle mass; natural units (1, 1) by default."""

    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0 and self.mass > 0):
            raise ParameterError("hbar and mass must be strictly positive")


NATURAL_UNITS = UnitScalars()


class Point3(NamedTuple):
    x: float
    y: float
    z: float


@dataclass(frozen=True)
class SpaceSpec:
    """One of the five spaces with its metric and potential constants.

    ``metric`` and ``potential`` hold the per-kind constants (missing keys
    default to zero, unknown keys are rejected).  Instances are immutable and
    safely shareable between workers.
    """

    kind: SpaceKind
    metric: Mapping[str, float] = field(default_factory=dict)
    potential: Mapping[str, float] = field(default_factory=dict)
    units: UnitScalars = NATURAL_UNITS

    def __post_init__(self):
        kind = SpaceKind(self.kind)
        object.__setattr__(self, "kind", kind)
        for attr, allowed in (("metric", _METRIC_KEYS[kind]),
                              ("potential", _POTENTIAL_KEYS[kind])):
            given = dict(getattr(self, attr))
            unknown = set(given) - set(allowed)
            if unknown:
                raise ConfigError(
                    f"{kind.value} {attr} constants {sorted(unknown)} unknown; "
                    f"allowed: {list(allowed)}")
            full = {k: float(given.get(k, 0.0)) for k in allowed}
            for k, v in full.items():
                if not math.isfinite(v):
                    raise ConfigError(f"{attr} constant {k} must be finite, got {v}")
            object.__setattr__(self, attr, MappingProxyType(full))

    # -- convenience constructors ------------------------------------------

    @classmethod
    def ki(cls, *, alpha=0.0, beta_x=0.0, beta_y=0.0, beta_z=0.0, delta=0.0,
           omega=0.0, k_x=0.0, k_y=0.0, k_z=0.0, units=NATURAL_UNITS):
        return cls(SpaceKind.KI,
                   {"alpha": alpha, "beta_x": beta_x, "beta_y": beta_y,
                    "beta_z": beta_z, "delta": delta},
                   {"omega": omega, "k_x": k_x, "k_y": k_y, "k_z": k_z}, units)

    @classmethod
    def kii(cls, *, alpha=0.0, beta_x=0.0, beta_y=0.0, delta=0.0,
            omega=0.0, k_x=0.0, k_y=0.0, units=NATURAL_UNITS):
        return cls(SpaceKind.KII,
                   {"alpha": alpha, "beta_x": beta_x, "beta_y": beta_y,
                    "delta": delta},
                   {"omega": omega, "k_x": k_x, "k_y": k_y}, units)

    @classmethod
    def kiii(cls, *, alpha1=0.0, beta=0.0, gamma=0.0, delta=0.0,
             alpha2=0.0, k1=0.0, k2=0.0, units=NATURAL_UNITS):
        return cls(SpaceKind.KIII,
                   {"alpha1": alpha1, "beta": beta, "gamma": gamma,
                    "delta": delta},
                   {"alpha2": alpha2, "k1": k1, "k2": k2}, units)

    @classmethod
    def kiv(cls, *, alpha=0.0, beta=0.0, gamma=0.0, delta=0.0,
            k1=0.0, k2=0.0, k3=0.0, units=NATURAL_UNITS):
        return cls(SpaceKind.KIV,
                   {"alpha": alpha, "beta": beta, "gamma": gamma,
                    "delta": delta},
                   {"k1": k1, "k2": k2, "k3": k3}, units)

    @classmethod
    def kv(cls, *, alpha=0.0, beta=0.0, gamma=0.0, delta=0.0,
           k1=0.0, k2=0.0, k3=0.0, units=NATURAL_UNITS):
        return cls(SpaceKind.KV,
                   {"alpha": alpha, "beta": beta, "gamma": gamma,
                    "delta": delta},
                   {"k1": k1, "k2": k2, "k3": k3}, units)

    # -- helpers -----------------------------------------------------------

    @property
    def is_flat_limit(self) -> bool:
        """True iff every metric constant vanishes except delta."""
        return all(v == 0.0 for k, v in self.metric.items() if k != "delta")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "metric": dict(self.metric),
            "potential": dict(self.potential),
            "units": {"hbar": self.units.hbar, "mass": self.units.mass},
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "SpaceSpec":
        allowed = {"kind", "metric", "potential", "units"}
        unknown = set(d) - allowed
        if unknown:
            raise ConfigError(f"space: unknown keys {sorted(unknown)}")
        if "kind" not in d:
            raise ConfigError("space: missing 'kind'")
        try:
            kind = SpaceKind(d["kind"])
        except ValueError:
            raise ConfigError(f"space: unknown kind {d['kind']!r}") from None
        u = d.get("units", {})
        unknown = set(u) - {"hbar", "mass"}
        if unknown:
            raise ConfigError(f"units: unknown keys {sorted(unknown)}")
        units = UnitScalars(float(u.get("hbar", 1.0)), float(u.get("mass", 1.0)))
        return cls(kind, d.get("metric", {}), d.get("potential", {}), units)


# ---------------------------------------------------------------------------
# metric factor and its analytic per-axis partials
# ---------------------------------------------------------------------------

def _check_axis(coord: float, label: str):
    if abs(coord) < ON_AXIS_TOL:
        raise SingularPointError(f"point lies on the singular set ({label} ~ 0)")


def _fxx_prefactor(spec: SpaceSpec) -> float:
    """hbar^2/2m prefactor absorbed into the KIV/KV metric definitions."""
    return spec.units.hbar ** 2 / (2.0 * spec.units.mass)


def _partials(spec: SpaceSpec, p: Point3):
    """f and its first/second partials along each axis (diagonal Hessian only).

    Raises SingularPointError when a term with nonzero coefficient would be
    evaluated on its singular set.
    """
    x, y, z = p
    m = spec.metric
    kind = spec.kind
    g1 = np.zeros(3)
    g2 = np.zeros(3)

    if kind in (SpaceKind.KI, SpaceKind.KII):
        al = m["alpha"]
        betas = [m["beta_x"], m["beta_y"], m["beta_z"] if kind is SpaceKind.KI else 0.0]
        f = m["delta"]
        if kind is SpaceKind.KI:
            f += al * (x * x + y * y + z * z)
        else:
            f += al * (x * x + y * y + 4.0 * z * z)
        for a, (c, b) in enumerate(zip(p, betas)):
            if b != 0.0:
                _check_axis(c, _AXES[a])
                f += b / c ** 2
                g1[a] += -2.0 * b / c ** 3
                g2[a] += 6.0 * b / c ** 4
            scale = 4.0 if (kind is SpaceKind.KII and a == 2) else 1.0
            g1[a] += 2.0 * al * scale * c
            g2[a] += 2.0 * al * scale
        return f, g1, g2

    if kind is SpaceKind.KIII:
        a1, be, ga = m["alpha1"], m["beta"], m["gamma"]
        f = m["delta"]
        r2 = x * x + y * y + z * z
        if a1 != 0.0:
            if r2 < ON_AXIS_TOL ** 2:
                raise SingularPointError("point lies at the origin (r ~ 0)")
            r = math.sqrt(r2)
            f += -a1 / r
            r3, r5 = r ** 3, r ** 5
            for a, c in enumerate(p):
                g1[a] += a1 * c / r3
                g2[a] += a1 * (1.0 / r3 - 3.0 * c * c / r5)
        if be != 0.0:
            _check_axis(x, "x")
            f += be / x ** 2
            g1[0] += -2.0 * be / x ** 3
            g2[0] += 6.0 * be / x ** 4
        if ga != 0.0:
            _check_axis(y, "y")
            f += ga / y ** 2
            g1[1] += -2.0 * ga / y ** 3
            g2[1] += 6.0 * ga / y ** 4
        return f, g1, g2

    # KIV / KV
    c0 = _fxx_prefactor(spec)
    al, be, ga = m["alpha"], m["beta"], m["gamma"]
    f = m["delta"]
    if al != 0.0 or be != 0.0:
        _check_axis(y, "y")
    if al != 0.0:
        rho2 = x * x + y * y
        if rho2 < ON_AXIS_TOL ** 2:
            raise SingularPointError("point lies on the z-axis (rho ~ 0)")
        rho = math.sqrt(rho2)
        f += c0 * al * x / (y * y * rho)
        g1[0] += c0 * al / rho ** 3
        g2[0] += -3.0 * c0 * al * x / rho ** 5
        g1[1] += -c0 * al * x * (2.0 * rho2 + y * y) / (y ** 3 * rho ** 3)
        g2[1] += c0 * al * x * (6.0 / (y ** 4 * rho)
                                + 3.0 / (y ** 2 * rho ** 3)
                                + 3.0 / rho ** 5)
    if be != 0.0:
        f += c0 * be / y ** 2
        g1[1] += -2.0 * c0 * be / y ** 3
        g2[1] += 6.0 * c0 * be / y ** 4
    if kind is SpaceKind.KIV:
        if ga != 0.0:
            _check_axis(z, "z")
            f += c0 * ga / z ** 2
            g1[2] += -2.0 * c0 * ga / z ** 3
            g2[2] += 6.0 * c0 * ga / z ** 4
    else:  # KV: linear gamma*z term, no hbar^2/2m prefactor
        f += ga * z
        g1[2] += ga
    return f, g1, g2


def metric_factor(spec: SpaceSpec, p: Point3) -> float:
    """The conformal factor f at p.  Raises if p is singular or f <= 0."""
    p = Point3(*p)
    f, _, _ = _partials(spec, p)
    if f <= 0.0:
        raise NonPositiveMetricError(
            f"metric factor must be positive; f({tuple(p)}) = {f}")
    return f


def _numeric_partials(spec: SpaceSpec, p: Point3):
    """Central-difference first/second partials of f (test-oracle path)."""
    f0 = metric_factor(spec, p)
    g1 = np.zeros(3)
    g2 = np.zeros(3)
    for a in range(3):
        h = 1e-5 * (1.0 + abs(p[a]))
        up = list(p)
        dn = list(p)
        up[a] += h
        dn[a] -= h
        fp = metric_factor(spec, Point3(*up))
        fm = metric_factor(spec, Point3(*dn))
        g1[a] = (fp - fm) / (2.0 * h)
        g2[a] = (fp - 2.0 * f0 + fm) / h ** 2
    return f0, g1, g2


def h_decomposition(spec: SpaceSpec, p: Point3, axis: str) -> float:
    """h_a with f = h_a^2/x_a^2 (h_a = sqrt(f)|x_a| for every axis)."""
    if axis not in _AXES:
        raise ParameterError(f"axis must be one of {_AXES}, got {axis!r}")
    p = Point3(*p)
    f = metric_factor(spec, p)
    return math.sqrt(f) * abs(p[_AXES.index(axis)])


def _delta_v_from_partials(f, g1, g2, units: UnitScalars, dim: int) -> float:
    """General-D quantum potential from f and its diagonal partials.

    Uses f_a = sqrt(f):  f_{a,a} = g1/(2 sqrt f),
    f_{a,aa} = g2/(2 sqrt f) - g1^2/(4 f^{3/2}).
    """
    if abs(f) < 1e-12:
        raise SingularPointError(f"metric factor too small for DeltaV (f = {f})")
    sf = math.sqrt(f)
    total = 0.0
    for a in range(3):
        fa1 = g1[a] / (2.0 * sf)
        fa2 = g2[a] / (2.0 * sf) - g1[a] ** 2 / (4.0 * f * sf)
        total += ((dim - 4) * fa1 ** 2 + 2.0 * sf * fa2) / f ** 2
    return units.hbar ** 2 * (dim - 2) / (8.0 * units.mass) * total


def _delta_v_general(spec: SpaceSpec, p: Point3, dim: int,
                     derivs: str = "analytic") -> float:
    p = Point3(*p)
    if derivs == "analytic":
        f, g1, g2 = _partials(spec, p)
    elif derivs == "numeric":
        f, g1, g2 = _numeric_partials(spec, p)
    else:
        raise ParameterError(f"derivs must be 'analytic' or 'numeric', got {derivs!r}")
    if f <= 0.0:
        raise NonPositiveMetricError(f"f({tuple(p)}) = {f} is not positive")
    return _delta_v_from_partials(f, g1, g2, spec.units, dim)


def delta_v_total(spec: SpaceSpec, p: Point3, derivs: str = "analytic") -> float:
    """The full quantum curvature correction DeltaV (D = 3) at p."""
    return _delta_v_general(spec, p, 3, derivs)


def _axis_split(spec: SpaceSpec, p: Point3, a: int):
    """(DeltaV_1, DeltaV_2) contribution of axis a, from the h-rewriting.

    With g(x) = x^2 f:  h = sqrt(g), h' = g'/(2h), h'' = g''/(2h) - g'^2/(4g h).
    """
    f, g1, g2 = _partials(spec, p)
    if f <= 0.0:
        raise NonPositiveMetricError(f"f({tuple(p)}) = {f} is not positive")
    x = p[a]
    g = x * x * f
    gp = 2.0 * x * f + x * x * g1[a]
    gpp = 2.0 * f + 4.0 * x * g1[a] + x * x * g2[a]
    h = math.sqrt(g)
    hp = gp / (2.0 * h)
    hpp = gpp / (2.0 * h) - gp ** 2 / (4.0 * g * h)
    pref = spec.units.hbar ** 2 / (8.0 * spec.units.mass)
    dv1 = pref * (2.0 * x * x * h * hpp - 2.0 * x * h * hp - x * x * hp ** 2) / h ** 4
    dv2 = 3.0 * pref / h ** 2
    return dv1, dv2


def delta_v_split(spec: SpaceSpec, p: Point3):
    """(DeltaV_1, DeltaV_2) totals; requires all three coordinates off-axis."""
    p = Point3(*p)
    for a in range(3):
        _check_axis(p[a], _AXES[a])
    dv1 = 0.0
    dv2 = 0.0
    for a in range(3):
        d1, d2 = _axis_split(spec, p, a)
        dv1 += d1
        dv2 += d2
    return dv1, dv2


def grad_log_sqrt_g(spec: SpaceSpec, p: Point3) -> np.ndarray:
    """Gamma_i = d_i ln sqrt(g) = (3/2) d_i f / f  (sqrt g = f^{3/2})."""
    p = Point3(*p)
    f, g1, _ = _partials(spec, p)
    if f <= 0.0:
        raise NonPositiveMetricError(f"f({tuple(p)}) = {f} is not positive")
    return 1.5 * g1 / f


def require_discrete_kind(spec: SpaceSpec, what: str):
    """KIV/KV support no discrete quantization condition."""
    if spec.kind in (SpaceKind.KIV, SpaceKind.KV):
        raise KindError(
            f"{what} is not defined for {spec.kind.value}: "
            "this space supports only a continuous spectrum")
