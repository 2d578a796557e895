"""Quantization conditions, validity windows, and the bound-state root solver.

Dividing the flat Hamiltonian by the conformal factor turns each constant of
the flat problem into an energy-dependent "effective" index:

    omega_eff^2 = omega^2 - 2 alpha E / m
    k_eff_a^2   = k_a^2 - 2 m beta_a E / hbar^2        (KI, KII; a = x,y,z)
    k_eff_1^2   = k1^2 - 2 m beta E / hbar^2           (KIII; k2 with gamma)
    alpha_eff   = alpha2 - alpha1 E                    (KIII)
    kappa       = alpha_eff sqrt(-m/(2 delta E))/hbar  (KIII; needs delta*E < 0)

The bound-state energies are the roots of the transcendental conditions

    KI  :  delta E = hbar omega_eff (2N + k_x~ + k_y~ + k_z~ + 3),
           N = n_r + n_theta + n_phi  (= n_x + n_y + n_z)
    KII :  delta E = hbar omega_eff (N + k_x~ + k_y~ + 5/2),
           N = 2(n_x + n_y) + n_z
    KIII:  2 + 2 n_phi + l + n_r (+-) k_1~ (+-) k_2~ - kappa = 0,
           N = 2 + 2 n_phi + l + n_r

solved on the maximal open energy intervals where every required index is
real (the "validity windows"), by dense scanning for sign changes plus
bisection on the unsquared residual.  Rationalizing these conditions gives
polynomials up to twelfth order in E; working with the unsquared residual
keeps only sign-consistent roots, which is why some squared closed forms
below carry sign corrections relative to their naive form.

KIV and KV admit no discrete condition (continuous spectrum only); their
effective indices are still computed for classification and reporting.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import (
    ConfigError,
    KindError,
    OutOfWindowError,
    ParameterError,
    PatternMismatchError,
)
from .spaces import SpaceKind, SpaceSpec, require_discrete_kind

logger = logging.getLogger(__name__)

# Scan grids never sample magnitudes below this (natural units).
SCAN_FLOOR = 1e-9


class Scheme(str, Enum):
    POLAR = "polar"
    CARTESIAN = "cartesian"
    COULOMB = "coulomb"


class Provenance(str, Enum):
    ROOT_SOLVER = "root_solver"
    CLOSED_FORM = "closed_form"
    ORACLE = "oracle"


class SpectrumType(str, Enum):
    DISCRETE_CANDIDATES = "discrete_candidates"
    CONTINUOUS_ONLY = "continuous_only"


@dataclass(frozen=True)
class QuantumNumbers:
    """Integer labels of a level, in one of three schemes.

    polar     : (n_r, n_theta, n_phi).  For the spherical chart n_theta is the
                polar-angle label; the circular-polar chart reads the same slot
                as the z-label.  Either reading gives the same aggregate N.
    cartesian : (n_x, n_y, n_z)
    coulomb   : (n_r, l, n_phi)
    """

    scheme: Scheme
    labels: tuple[int, int, int]

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        labels = tuple(int(v) for v in self.labels)
        if len(labels) != 3 or any(v < 0 for v in labels):
            raise ParameterError(f"labels must be three non-negative integers, got {self.labels}")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def polar(cls, n_r: int, n_theta: int, n_phi: int):
        return cls(Scheme.POLAR, (n_r, n_theta, n_phi))

    @classmethod
    def cartesian(cls, n_x: int, n_y: int, n_z: int):
        return cls(Scheme.CARTESIAN, (n_x, n_y, n_z))

    @classmethod
    def coulomb(cls, n_r: int, l: int, n_phi: int):
        return cls(Scheme.COULOMB, (n_r, l, n_phi))

    def _expect(self, scheme: Scheme):
        if self.scheme is not scheme:
            raise ParameterError(f"labels use scheme {self.scheme.value!r}, "
                                 f"expected {scheme.value!r}")

    @property
    def n_r(self) -> int:
        if self.scheme is Scheme.CARTESIAN:
            raise ParameterError("cartesian labels have no n_r")
        return self.labels[0]

    @property
    def n_theta(self) -> int:
        self._expect(Scheme.POLAR)
        return self.labels[1]

    @property
    def n_phi(self) -> int:
        if self.scheme is Scheme.CARTESIAN:
            raise ParameterError("cartesian labels have no n_phi")
        return self.labels[2]

    @property
    def l(self) -> int:
        self._expect(Scheme.COULOMB)
        return self.labels[1]

    @property
    def n_x(self) -> int:
        self._expect(Scheme.CARTESIAN)
        return self.labels[0]

    @property
    def n_y(self) -> int:
        self._expect(Scheme.CARTESIAN)
        return self.labels[1]

    @property
    def n_z(self) -> int:
        self._expect(Scheme.CARTESIAN)
        return self.labels[2]

    def aggregate_n(self, kind: SpaceKind) -> int:
        """The aggregate label N entering the quantization condition."""
        a, b, c = self.labels
        if kind is SpaceKind.KI:
            if self.scheme is Scheme.COULOMB:
                raise ParameterError("KI levels use polar or cartesian labels")
            return a + b + c
        if kind is SpaceKind.KII:
            if self.scheme is Scheme.CARTESIAN:
                return 2 * (a + b) + c
            if self.scheme is Scheme.POLAR:
                # circular-polar labels: (n_rho, n_z, n_phi)
                return 2 * (a + c) + b
            raise ParameterError("KII levels use cartesian or polar labels")
        if kind is SpaceKind.KIII:
            self._expect(Scheme.COULOMB)
            return 2 + 2 * c + b + a
        raise KindError(f"{kind.value} has no aggregate label (continuous spectrum)")


def _normalize_branch(branch_signs) -> tuple[int, int, int]:
    if branch_signs is None:
        return (1, 1, 1)
    signs = tuple(int(s) for s in branch_signs)
    if any(s not in (-1, 1) for s in signs) or not 1 <= len(signs) <= 3:
        raise ParameterError(f"branch signs must be +-1 entries, got {branch_signs}")
    return signs + (1,) * (3 - len(signs))


@dataclass(frozen=True)
class EffectiveIndices:
    """Energy-dependent indices with realness flags.

    ``omega_eff``/``k_eff`` entries are NaN when the radicand is negative (the
    matching flag is False); nothing is thrown for imaginary indices.
    ``lambda2`` is the index of the reduced half-line problem that carries the
    full transformed eigenvalue (the paper-facing lambda_2 for the spherical
    chart of KI and for KIII; an effective composition for KII and for
    cartesian labels).  ``kappa`` is None when delta*E >= 0.
    """

    omega_eff: float | None
    omega_eff_is_real: bool
    k_eff: tuple[float, ...]
    k_eff_is_real: tuple[bool, ...]
    lambda1: float | None
    lambda2: float | None
    kappa: float | None
    alpha_eff: float | None
    branch_signs: tuple[int, int, int]
    energy: float

    @property
    def all_real(self) -> bool:
        ok = all(self.k_eff_is_real)
        if self.omega_eff is not None:
            ok = ok and self.omega_eff_is_real
        return ok


def _sqrt_flagged(radicand: float) -> tuple[float, bool]:
    if radicand >= 0.0:
        return math.sqrt(radicand), True
    return math.nan, False


def effective_indices(spec: SpaceSpec, qn: QuantumNumbers, energy: float,
                      branch_signs=None) -> EffectiveIndices:
    """All effective indices of the given kind at energy E (realness flagged)."""
    signs = _normalize_branch(branch_signs)
    hbar, m = spec.units.hbar, spec.units.mass
    met, pot = spec.metric, spec.potential
    E = float(energy)
    kind = spec.kind

    if kind in (SpaceKind.KI, SpaceKind.KII):
        om, om_ok = _sqrt_flagged(pot["omega"] ** 2 - 2.0 * met["alpha"] * E / m)
        axes = ("x", "y", "z") if kind is SpaceKind.KI else ("x", "y")
        ks, flags = [], []
        for a in axes:
            val, ok = _sqrt_flagged(pot[f"k_{a}"] ** 2
                                    - 2.0 * m * met[f"beta_{a}"] * E / hbar ** 2)
            ks.append(val)
            flags.append(ok)
        lam1 = lam2 = None
        if kind is SpaceKind.KI:
            if qn.scheme is Scheme.POLAR:
                lam1 = 2.0 * qn.n_phi + ks[0] + ks[1] + 1.0
                lam2 = 2.0 * qn.n_theta + ks[2] + lam1 + 1.0
            elif qn.scheme is Scheme.CARTESIAN:
                # reduction with n_x as the radial slot
                lam2 = 2.0 * (qn.n_y + qn.n_z) + ks[0] + ks[1] + ks[2] + 2.0
        else:
            if qn.scheme is Scheme.POLAR:
                lam1 = 2.0 * qn.n_phi + ks[0] + ks[1] + 1.0
                lam2 = lam1 + qn.n_theta + 0.5  # n_theta slot = z-label
            elif qn.scheme is Scheme.CARTESIAN:
                lam2 = qn.n_z + ks[0] + ks[1] + 1.5
        return EffectiveIndices(om, om_ok, tuple(ks), tuple(flags),
                                lam1, lam2, None, None, signs, E)

    if kind is SpaceKind.KIII:
        k1, ok1 = _sqrt_flagged(pot["k1"] ** 2 - 2.0 * m * met["beta"] * E / hbar ** 2)
        k2, ok2 = _sqrt_flagged(pot["k2"] ** 2 - 2.0 * m * met["gamma"] * E / hbar ** 2)
        alpha_eff = pot["alpha2"] - met["alpha1"] * E
        dE = met["delta"] * E
        kappa = None
        if dE < 0.0:
            kappa = alpha_eff * math.sqrt(-m / (2.0 * dE)) / hbar
        lam1 = lam2 = None
        if ok1 and ok2:
            lam1 = 2.0 * qn.n_phi + signs[0] * k1 + signs[1] * k2 + 1.0
            lam2 = qn.l + lam1 + 0.5
        return EffectiveIndices(None, True, (k1, k2), (ok1, ok2),
                                lam1, lam2, kappa, alpha_eff, signs, E)

    # KIV / KV centrifugal kinds: reporting only
    k1sq = pot["k2"] ** 2 + pot["k1"] ** 2 - 2.0 * m * (met["beta"] + met["alpha"]) * E / hbar ** 2
    k2sq = pot["k2"] ** 2 - pot["k1"] ** 2 + 2.0 * m * (met["beta"] - met["alpha"]) * E / hbar ** 2
    k1, ok1 = _sqrt_flagged(k1sq)
    k2, ok2 = _sqrt_flagged(k2sq)
    if kind is SpaceKind.KIV:
        k3, ok3 = _sqrt_flagged(pot["k3"] ** 2 - 2.0 * m * met["gamma"] * E / hbar ** 2)
    else:
        # linear slope transform of the KV z-potential; always real
        k3, ok3 = pot["k3"] - 2.0 * m * met["gamma"] * E / hbar, True
    lam1 = lam2 = None
    if qn.scheme is Scheme.POLAR and ok1 and ok2:
        lam1 = qn.n_phi + 0.5 * (k1 + k2 + 1.0)
        if kind is SpaceKind.KIV and ok3:
            lam2 = 2.0 * qn.n_theta + lam1 + signs[2] * k3 + 1.0
    return EffectiveIndices(None, True, (k1, k2, k3), (ok1, ok2, ok3),
                            lam1, lam2, None, None, signs, E)


@dataclass(frozen=True)
class ValidityWindow:
    """Maximal open energy interval on which the quantization condition is real."""

    lower: float
    upper: float
    constraints: tuple[str, ...]

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ParameterError(f"window requires lower < upper, got "
                                 f"({self.lower}, {self.upper})")

    def contains(self, energy: float) -> bool:
        return self.lower < energy < self.upper


def _linear_constraints(spec: SpaceSpec):
    """Realness constraints as (tag, c0, c1) meaning c0 + c1*E >= 0."""
    hbar, m = spec.units.hbar, spec.units.mass
    met, pot = spec.metric, spec.potential
    out = []
    if spec.kind in (SpaceKind.KI, SpaceKind.KII):
        out.append(("omega_eff real", pot["omega"] ** 2, -2.0 * met["alpha"] / m))
        axes = ("x", "y", "z") if spec.kind is SpaceKind.KI else ("x", "y")
        for a in axes:
            out.append((f"k_eff_{a} real", pot[f"k_{a}"] ** 2,
                        -2.0 * m * met[f"beta_{a}"] / hbar ** 2))
    else:  # KIII
        out.append(("k_eff_1 real", pot["k1"] ** 2, -2.0 * m * met["beta"] / hbar ** 2))
        out.append(("k_eff_2 real", pot["k2"] ** 2, -2.0 * m * met["gamma"] / hbar ** 2))
    return out


def validity_windows(spec: SpaceSpec, qn: QuantumNumbers | None = None
                     ) -> list[ValidityWindow]:
    """Maximal open E-intervals where every index of the condition is real.

    Each realness requirement is a half-line (or all of R), so the
    intersection is a single interval; an empty list means no admissible
    energies exist.  For KIII the kappa radicand additionally requires
    delta*E < 0.
    """
    require_discrete_kind(spec, "validity_windows")
    lo, hi = -math.inf, math.inf
    tags = []
    for tag, c0, c1 in _linear_constraints(spec):
        if c1 == 0.0:
            if c0 < 0.0:
                return []
            continue  # constraint holds for every E; not binding
        bound = -c0 / c1
        if c1 > 0.0:
            lo = max(lo, bound)
        else:
            hi = min(hi, bound)
        tags.append(tag)
    if spec.kind is SpaceKind.KIII:
        delta = spec.metric["delta"]
        if delta == 0.0:
            return []  # kappa undefined for delta = 0
        if delta > 0.0:
            hi = min(hi, 0.0)
        else:
            lo = max(lo, 0.0)
        tags.append("delta*E negative")
    if not lo < hi:
        return []
    return [ValidityWindow(lo, hi, tuple(tags))]


@dataclass(frozen=True)
class EnergyLevel:
    energy: float
    residual: float
    qn: QuantumNumbers
    branch_signs: tuple[int, int, int]
    window_id: int
    provenance: Provenance


def _residual_array(spec: SpaceSpec, qn: QuantumNumbers, E: np.ndarray,
                    signs: tuple[int, int, int]) -> np.ndarray:
    """Vectorized unsquared residual; NaN wherever an index turns imaginary."""
    hbar, m = spec.units.hbar, spec.units.mass
    met, pot = spec.metric, spec.potential
    E = np.asarray(E, dtype=float)
    N = qn.aggregate_n(spec.kind)
    with np.errstate(invalid="ignore", divide="ignore"):
        if spec.kind in (SpaceKind.KI, SpaceKind.KII):
            om = np.sqrt(pot["omega"] ** 2 - 2.0 * met["alpha"] * E / m)
            if spec.kind is SpaceKind.KI:
                ks = sum(np.sqrt(pot[f"k_{a}"] ** 2
                                 - 2.0 * m * met[f"beta_{a}"] * E / hbar ** 2)
                         for a in ("x", "y", "z"))
                return met["delta"] * E - hbar * om * (2.0 * N + ks + 3.0)
            ks = sum(np.sqrt(pot[f"k_{a}"] ** 2
                             - 2.0 * m * met[f"beta_{a}"] * E / hbar ** 2)
                     for a in ("x", "y"))
            return met["delta"] * E - hbar * om * (N + ks + 2.5)
        # KIII
        k1 = np.sqrt(pot["k1"] ** 2 - 2.0 * m * met["beta"] * E / hbar ** 2)
        k2 = np.sqrt(pot["k2"] ** 2 - 2.0 * m * met["gamma"] * E / hbar ** 2)
        kappa = (pot["alpha2"] - met["alpha1"] * E) * np.sqrt(
            -m / (2.0 * met["delta"] * E)) / hbar
        return N + signs[0] * k1 + signs[1] * k2 - kappa


def quantization_residual(spec: SpaceSpec, qn: QuantumNumbers, energy: float,
                          branch_signs=None) -> float:
    """The unsquared quantization residual R(E); roots of R are bound states.

    KI  : R = delta E - hbar omega_eff (2N + sum k_eff + 3)
    KII : R = delta E - hbar omega_eff (N + k_eff_x + k_eff_y + 5/2)
    KIII: R = N (+-) k_eff_1 (+-) k_eff_2 - kappa,  N = 2 + 2 n_phi + l + n_r
    """
    require_discrete_kind(spec, "quantization_residual")
    signs = _normalize_branch(branch_signs)
    windows = validity_windows(spec, qn)
    if not any(w.contains(energy) for w in windows):
        raise OutOfWindowError(
            f"E = {energy} lies outside every validity window "
            f"{[(w.lower, w.upper) for w in windows]}")
    return float(_residual_array(spec, qn, np.asarray([energy]), signs)[0])


@dataclass(frozen=True)
class SolverConfig:
    """Scan/bisection configuration; fields surface as CLI flags."""

    scan_points_per_decade: int = 10_000
    tol_rel: float = 1e-13
    e_max_abs: float = 1e6
    dedupe_rel: float = 1e-9
    branch_signs: tuple[int, ...] = (1, 1)

    def __post_init__(self):
        if self.scan_points_per_decade <= 0:
            raise ConfigError("scan_points_per_decade must be positive")
        if not self.tol_rel > 0:
            raise ConfigError("tol_rel must be positive")
        if not self.e_max_abs > 0:
            raise ConfigError("e_max_abs must be positive")
        if not self.dedupe_rel > 0:
            raise ConfigError("dedupe_rel must be positive")
        object.__setattr__(self, "branch_signs", _normalize_branch(self.branch_signs))


def _scan_grid(lo: float, hi: float, per_decade: int) -> np.ndarray:
    """Log-density scan samples strictly inside (lo, hi), both bounds finite."""

    def decades(a: float, b: float) -> np.ndarray:
        # log-spaced magnitudes in [a, b], 0 < a < b
        la, lb = math.log10(a), math.log10(b)
        n = max(2, int(round(per_decade * (lb - la))) + 1)
        return np.logspace(la, lb, n)

    parts = []
    if hi > SCAN_FLOOR:
        parts.append(decades(max(lo, SCAN_FLOOR), hi))
    if lo < -SCAN_FLOOR:
        parts.append(-decades(max(-hi, SCAN_FLOOR), -lo))
    # boundary nudges and a zero-neighborhood sample
    extra = [lo + 1e-12 * (1.0 + abs(lo)), hi - 1e-12 * (1.0 + abs(hi))]
    if lo < 0.0 < hi:
        extra.append(0.0)
    parts.append(np.asarray(extra))
    grid = np.unique(np.concatenate(parts))
    return grid[(grid > lo) & (grid < hi)]


def _bisect(fn, a: float, b: float, fa: float, fb: float, tol_rel: float) -> float:
    for _ in range(200):
        mid = 0.5 * (a + b)
        if mid == a or mid == b:
            break
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (fa < 0.0) != (fm < 0.0):
            b, fb = mid, fm
        else:
            a, fa = mid, fm
        if (b - a) <= tol_rel * max(abs(mid), SCAN_FLOOR):
            break
    return 0.5 * (a + b)


def solve_levels(spec: SpaceSpec, qn: QuantumNumbers,
                 cfg: SolverConfig | None = None) -> list[EnergyLevel]:
    """All sign-change roots of the quantization residual, one list per call.

    Scans every validity window on a logarithmic grid, refines each bracket by
    bisection to ``cfg.tol_rel`` (relative), deduplicates within
    ``cfg.dedupe_rel``, and returns levels sorted by energy.  An empty result
    is not an error.
    """
    require_discrete_kind(spec, "solve_levels")
    cfg = cfg or SolverConfig()
    signs = cfg.branch_signs
    if spec.kind in (SpaceKind.KI, SpaceKind.KII) and spec.metric["delta"] == 0.0:
        logger.warning("%s with delta = 0: left side of the quantization "
                       "condition vanishes identically; no discrete levels",
                       spec.kind.value)
        return []

    roots: list[tuple[float, int]] = []
    for wid, window in enumerate(validity_windows(spec, qn)):
        lo = max(window.lower, -cfg.e_max_abs)
        hi = min(window.upper, cfg.e_max_abs)
        if not lo < hi:
            continue
        grid = _scan_grid(lo, hi, cfg.scan_points_per_decade)
        if grid.size < 2:
            continue
        res = _residual_array(spec, qn, grid, signs)
        ok = np.isfinite(res)
        g, r = grid[ok], res[ok]
        if g.size < 2:
            continue
        sign_change = np.nonzero((r[:-1] < 0.0) != (r[1:] < 0.0))[0]
        fn = lambda e: float(_residual_array(spec, qn, np.asarray([e]), signs)[0])
        for i in sign_change:
            roots.append((_bisect(fn, g[i], g[i + 1], r[i], r[i + 1], cfg.tol_rel), wid))
        for i in np.nonzero(r == 0.0)[0]:
            roots.append((float(g[i]), wid))
        # a sign change in the final segment against a truncated bound suggests
        # roots beyond the |E| cutoff
        for bound, idx in ((window.lower, 0), (window.upper, -1)):
            if math.isinf(abs(bound)) and sign_change.size:
                edge = 0 if idx == 0 else g.size - 2
                if edge in sign_change and (lo == -cfg.e_max_abs if idx == 0
                                            else hi == cfg.e_max_abs):
                    logger.warning("residual sign change abuts the |E| <= %g "
                                   "truncation; spectrum may continue beyond it",
                                   cfg.e_max_abs)

    roots.sort()
    levels: list[EnergyLevel] = []
    for e, wid in roots:
        if levels and abs(e - levels[-1].energy) <= cfg.dedupe_rel * max(
                abs(e), abs(levels[-1].energy), SCAN_FLOOR):
            continue
        res = float(_residual_array(spec, qn, np.asarray([e]), signs)[0])
        levels.append(EnergyLevel(e, res, qn, signs, wid, Provenance.ROOT_SOLVER))
    return levels


def spectrum_type(spec: SpaceSpec) -> SpectrumType:
    """Discrete-candidate kinds (KI-KIII) vs continuous-only kinds (KIV, KV)."""
    if spec.kind in (SpaceKind.KIV, SpaceKind.KV):
        return SpectrumType.CONTINUOUS_ONLY
    return SpectrumType.DISCRETE_CANDIDATES


def radial_reduction(spec: SpaceSpec, qn: QuantumNumbers,
                     indices: EffectiveIndices):
    """(family, radial label, reduction index) of the reduced 1-D problem.

    The quantization condition of each kind is equivalent to the n-th
    eigenvalue condition of a single half-line problem:

        oscillator:  delta E = hbar omega_eff (2 n + lam + 1)
        coulomb   :  delta E = -m alpha_eff^2 / (2 hbar^2 (n + lam + 1/2)^2)

    with lam = indices.lambda2.  The angular/z labels enter only through lam.
    """
    if indices.lambda2 is None:
        raise ParameterError("no radial reduction: lambda2 undefined for "
                             f"{spec.kind.value} with scheme {qn.scheme.value}")
    if spec.kind is SpaceKind.KIII:
        return "coulomb", qn.n_r, indices.lambda2
    if spec.kind is SpaceKind.KI:
        n = qn.n_x if qn.scheme is Scheme.CARTESIAN else qn.n_r
        return "oscillator", n, indices.lambda2
    if spec.kind is SpaceKind.KII:
        n = qn.n_x + qn.n_y if qn.scheme is Scheme.CARTESIAN else qn.n_r
        return "oscillator", n, indices.lambda2
    raise KindError(f"{spec.kind.value} has no radial reduction")


# ---------------------------------------------------------------------------
# closed-form special cases
# ---------------------------------------------------------------------------

KI_OSCILLATOR_ONLY = "ki-oscillator-only"          # k = alpha = beta = 0, delta > 0
KI_FLAT_OSCILLATOR = "ki-flat-oscillator"          # alpha = beta = 0, delta > 0
KI_METRIC_ONLY = "ki-metric-only"                  # omega = k = 0
KI_PURE_ALPHA = "ki-pure-alpha"                    # omega = k = beta = 0
KI_OSC_BETA_LOWER = "ki-oscillator-beta-lower"     # k = alpha = 0 (garbled source)
KI_OSC_BETA_UPPER = "ki-oscillator-beta-upper"
KII_FLAT = "kii-flat"                              # alpha = beta = 0
KII_PURE_ALPHA = "kii-pure-alpha"                  # omega = k = beta = 0
KIII_COULOMB = "kiii-coulomb"                      # beta = gamma = alpha1 = 0
KIII_METRIC_ONLY = "kiii-metric-only"              # k = alpha2 = 0
KIII_COULOMB_METRIC_UPPER = "kiii-coulomb-metric-upper"  # k = 0, upper sign
KIII_COULOMB_METRIC_LOWER = "kiii-coulomb-metric-lower"  # k = 0, lower sign

SPECIAL_CASES = (
    KI_OSCILLATOR_ONLY, KI_FLAT_OSCILLATOR, KI_METRIC_ONLY, KI_PURE_ALPHA,
    KI_OSC_BETA_LOWER, KI_OSC_BETA_UPPER, KII_FLAT, KII_PURE_ALPHA,
    KIII_COULOMB, KIII_METRIC_ONLY,
    KIII_COULOMB_METRIC_UPPER, KIII_COULOMB_METRIC_LOWER,
)

# case -> (kind, constants that must vanish)
_CASE_PATTERNS = {
    KI_OSCILLATOR_ONLY: (SpaceKind.KI, ("k_x", "k_y", "k_z", "alpha",
                                        "beta_x", "beta_y", "beta_z")),
    KI_FLAT_OSCILLATOR: (SpaceKind.KI, ("alpha", "beta_x", "beta_y", "beta_z")),
    KI_METRIC_ONLY: (SpaceKind.KI, ("omega", "k_x", "k_y", "k_z")),
    KI_PURE_ALPHA: (SpaceKind.KI, ("omega", "k_x", "k_y", "k_z",
                                   "beta_x", "beta_y", "beta_z")),
    KI_OSC_BETA_LOWER: (SpaceKind.KI, ("k_x", "k_y", "k_z", "alpha")),
    KI_OSC_BETA_UPPER: (SpaceKind.KI, ("k_x", "k_y", "k_z", "alpha")),
    KII_FLAT: (SpaceKind.KII, ("alpha", "beta_x", "beta_y")),
    KII_PURE_ALPHA: (SpaceKind.KII, ("omega", "k_x", "k_y", "beta_x", "beta_y")),
    KIII_COULOMB: (SpaceKind.KIII, ("beta", "gamma", "alpha1")),
    KIII_METRIC_ONLY: (SpaceKind.KIII, ("k1", "k2", "alpha2")),
    KIII_COULOMB_METRIC_UPPER: (SpaceKind.KIII, ("k1", "k2")),
    KIII_COULOMB_METRIC_LOWER: (SpaceKind.KIII, ("k1", "k2")),
}


def _check_pattern(spec: SpaceSpec, case_id: str):
    if case_id not in _CASE_PATTERNS:
        raise PatternMismatchError(
            f"unknown special case {case_id!r}; known: {list(SPECIAL_CASES)}")
    kind, zeros = _CASE_PATTERNS[case_id]
    if spec.kind is not kind:
        raise PatternMismatchError(f"case {case_id!r} applies to {kind.value}, "
                                   f"spec is {spec.kind.value}")
    consts = {**spec.metric, **spec.potential}
    bad = [k for k in zeros if consts[k] != 0.0]
    if bad:
        raise PatternMismatchError(
            f"case {case_id!r} requires these constants to vanish: {list(zeros)}; "
            f"nonzero: {bad}")


def ki_oscillator_beta_branches(spec: SpaceSpec, qn: QuantumNumbers
                                ) -> tuple[complex, complex]:
    """Both (-, +) branches of the KI oscillator+inverse-square case (k=alpha=0).

    E(-+) = -(m omega^2 bt^2 / 2 delta^2) (1 -+ sqrt(1 - 2 delta hbar (2N+3)
            / (m omega bt^2)))^2,   bt = sum_a sqrt(beta_a).

    The printed source of this formula is garbled; this form is re-derived
    from the quantization condition (quadratic in sqrt(-2mE)) and may be
    complex ("semi-bound" pairs).  Requires beta_a >= 0 and omega, delta != 0.
    """
    _check_pattern(spec, KI_OSC_BETA_LOWER)
    met, pot = spec.metric, spec.potential
    hbar, m = spec.units.hbar, spec.units.mass
    betas = [met["beta_x"], met["beta_y"], met["beta_z"]]
    if any(b < 0 for b in betas):
        raise PatternMismatchError("beta constants must be >= 0 for this case")
    bt = sum(math.sqrt(b) for b in betas)
    omega, delta = pot["omega"], met["delta"]
    if bt == 0.0 or omega == 0.0 or delta == 0.0:
        raise PatternMismatchError("case requires nonzero beta sum, omega and delta")
    N = qn.aggregate_n(spec.kind)
    disc = complex(1.0 - 2.0 * delta * hbar * (2 * N + 3) / (m * omega * bt * bt))
    root = disc ** 0.5
    pref = -m * omega ** 2 * bt ** 2 / (2.0 * delta ** 2)
    return pref * (1.0 - root) ** 2, pref * (1.0 + root) ** 2


def closed_form_special(spec: SpaceSpec, case_id: str,
                        qn: QuantumNumbers) -> EnergyLevel:
    """The closed-form energy of one special zero-pattern of the constants.

    Sign conventions follow the unsquared quantization condition (squaring the
    condition introduces spurious sign branches which are not reported here);
    see the individual case notes in the README.
    """
    _check_pattern(spec, case_id)
    met, pot = spec.metric, spec.potential
    hbar, m = spec.units.hbar, spec.units.mass
    N = qn.aggregate_n(spec.kind)

    if case_id == KI_OSCILLATOR_ONLY:
        delta = met["delta"]
        if delta <= 0.0:
            raise PatternMismatchError("case requires delta > 0")
        e = hbar * pot["omega"] / delta * (2 * N + 3)
    elif case_id == KI_FLAT_OSCILLATOR:
        delta = met["delta"]
        if delta <= 0.0:
            raise PatternMismatchError("case requires delta > 0")
        e = hbar * pot["omega"] / delta * (2 * N + pot["k_x"] + pot["k_y"]
                                           + pot["k_z"] + 3)
    elif case_id == KI_METRIC_ONLY:
        al = met["alpha"]
        betas = [met["beta_x"], met["beta_y"], met["beta_z"]]
        if any(al * b < 0 for b in betas):
            raise PatternMismatchError(
                "case requires alpha*beta_a >= 0 for every axis (real sqrt)")
        s = 1.0 if al >= 0 else -1.0
        denom = met["delta"] + 2.0 * s * sum(math.sqrt(al * b) for b in betas)
        if denom == 0.0:
            raise PatternMismatchError("degenerate denominator (delta + 2 sum sqrt(alpha beta) = 0)")
        e = -2.0 * al * hbar ** 2 * (2 * N + 3) ** 2 / (m * denom ** 2)
    elif case_id == KI_PURE_ALPHA:
        delta = met["delta"]
        if delta == 0.0:
            raise PatternMismatchError("case requires delta != 0")
        e = -2.0 * met["alpha"] * hbar ** 2 * (2 * N + 3) ** 2 / (m * delta ** 2)
    elif case_id in (KI_OSC_BETA_LOWER, KI_OSC_BETA_UPPER):
        lower, upper = ki_oscillator_beta_branches(spec, qn)
        val = lower if case_id == KI_OSC_BETA_LOWER else upper
        if abs(val.imag) > 1e-12 * max(1.0, abs(val)):
            raise PatternMismatchError(
                f"branch is complex (semi-bound): E = {val}; "
                "use ki_oscillator_beta_branches for the pair")
        e = val.real
    elif case_id == KII_FLAT:
        delta = met["delta"]
        if delta <= 0.0:
            raise PatternMismatchError("case requires delta > 0")
        e = hbar * pot["omega"] / delta * (N + pot["k_x"] + pot["k_y"] + 2.5)
    elif case_id == KII_PURE_ALPHA:
        delta = met["delta"]
        if delta == 0.0:
            raise PatternMismatchError("case requires delta != 0")
        e = -2.0 * met["alpha"] * hbar ** 2 * (N + 2.5) ** 2 / (m * delta ** 2)
    elif case_id == KIII_COULOMB:
        delta = met["delta"]
        if delta <= 0.0:
            raise PatternMismatchError("case requires delta > 0")
        e = -m * pot["alpha2"] ** 2 / (2.0 * delta * hbar ** 2
                                       * (N + pot["k1"] + pot["k2"]) ** 2)
    elif case_id == KIII_METRIC_ONLY:
        delta = met["delta"]
        if delta <= 0.0 or met["beta"] < 0 or met["gamma"] < 0:
            raise PatternMismatchError("case requires delta > 0 and beta, gamma >= 0")
        bhat = (math.sqrt(met["beta"]) + math.sqrt(met["gamma"])
                + met["alpha1"] / (2.0 * math.sqrt(delta)))
        if bhat <= 0.0:
            raise PatternMismatchError("case requires sqrt(beta)+sqrt(gamma)"
                                       "+alpha1/(2 sqrt(delta)) > 0")
        e = -hbar ** 2 * N ** 2 / (2.0 * m * bhat ** 2)
    else:  # KIII_COULOMB_METRIC_{UPPER,LOWER}
        delta = met["delta"]
        if delta <= 0.0 or met["beta"] < 0 or met["gamma"] < 0:
            raise PatternMismatchError("case requires delta > 0 and beta, gamma >= 0")
        bhat = (math.sqrt(met["beta"]) + math.sqrt(met["gamma"])
                + met["alpha1"] / (2.0 * math.sqrt(delta)))
        if bhat <= 0.0:
            raise PatternMismatchError("case requires a positive combined "
                                       "metric length (bhat > 0)")
        nt2 = N ** 2 - 2.0 * m * pot["alpha2"] * bhat / (math.sqrt(delta) * hbar ** 2)
        disc = 1.0 - 4.0 * m ** 2 * pot["alpha2"] ** 2 * bhat ** 2 / (delta * hbar ** 4 * nt2 ** 2)
        if nt2 <= 0.0 or disc < 0.0:
            raise PatternMismatchError(
                f"no real bound pair for these constants (Ntilde^2 = {nt2}, "
                f"discriminant = {disc})")
        sign = -1.0 if case_id == KIII_COULOMB_METRIC_UPPER else 1.0
        e = -hbar ** 2 * nt2 / (4.0 * m * bhat ** 2) * (1.0 + sign * math.sqrt(disc))

    # closed forms arising from the minus k-branches keep that convention
    signs = (-1, -1, 1) if case_id in (KIII_METRIC_ONLY, KIII_COULOMB_METRIC_UPPER,
                                       KIII_COULOMB_METRIC_LOWER) else (1, 1, 1)
    return EnergyLevel(float(e), 0.0, qn, signs, 0, Provenance.CLOSED_FORM)
