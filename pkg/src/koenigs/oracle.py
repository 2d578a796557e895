"""Independent verification of solved levels by finite-difference eigensolves.

The quantization condition of each discrete kind states that delta*E is an
eigenvalue of a transformed half-line radial problem whose parameters depend
on E.  This module re-derives each root *without* the closed-form index
algebra: the radial Hamiltonian is discretized on a uniform Dirichlet grid
(interior nodes only; second-order accurate) and its eigenvalues are obtained
from the symmetric tridiagonal matrix by bisection with Sturm sequences
(LAPACK ?stebz via scipy).  The self-consistency loop then solves

    F(E) = delta*E - eigenvalue_{n}(U_eff(. ; E)) = 0

by bracketing and bisection, recomputing the energy-dependent index lambda(E)
at every iteration.  The oracle deliberately never calls the residual or
closed-form routines of :mod:`koenigs.spectra`.

Dirichlet at r_min > 0 replaces the exact r^(lam+1/2) origin behavior; with
r_min = 1e-4 of the length scale the induced eigenvalue error is far below
the 1e-4 comparison tolerance for every index lam >= 3/2 (it grows toward
~r_min as lam -> 1/2, which matters only for bare s-wave Coulomb tests).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import GridError, KindError, ParameterError
from .spaces import NATURAL_UNITS, SpaceKind, SpaceSpec, UnitScalars
from .spectra import (
    EnergyLevel,
    Provenance,
    QuantumNumbers,
    effective_indices,
    radial_reduction,
    validity_windows,
)

_TAIL_LIMIT = 1e-8  # admissible eigenvector tail at r_max, relative to its max


@dataclass(frozen=True)
class FdGrid:
    """Uniform radial grid with Dirichlet conditions at both ends."""

    r_min: float
    r_max: float
    n_points: int = 4000

    def __post_init__(self):
        if not self.r_min > 0.0:
            raise GridError(f"r_min must be positive (singular 1/r^2 term), "
                            f"got {self.r_min}")
        if not self.r_max > self.r_min:
            raise GridError("r_max must exceed r_min")
        if self.n_points < 200:
            raise GridError(f"n_points must be >= 200, got {self.n_points}")

    @property
    def spacing(self) -> float:
        return (self.r_max - self.r_min) / (self.n_points - 1)

    def interior(self) -> np.ndarray:
        return np.linspace(self.r_min, self.r_max, self.n_points)[1:-1]


@dataclass(frozen=True)
class OscillatorPotential:
    """U(r) = m w^2 r^2/2 + hbar^2 (lam^2-1/4)/(2 m r^2); levels hw(2n+lam+1)."""

    lam: float
    omega_eff: float

    def u(self, r: np.ndarray, units: UnitScalars) -> np.ndarray:
        return (0.5 * units.mass * self.omega_eff ** 2 * r * r
                + units.hbar ** 2 * (self.lam ** 2 - 0.25) / (2.0 * units.mass * r * r))


@dataclass(frozen=True)
class CoulombPotential:
    """U(r) = -a/r + hbar^2 (lam^2-1/4)/(2 m r^2); levels -m a^2/(2 hbar^2 (n+lam+1/2)^2)."""

    lam: float
    alpha_eff: float

    def u(self, r: np.ndarray, units: UnitScalars) -> np.ndarray:
        return (-self.alpha_eff / r
                + units.hbar ** 2 * (self.lam ** 2 - 0.25) / (2.0 * units.mass * r * r))


def _validate(potential):
    if potential.lam <= -1.0:
        raise ParameterError(f"lam must exceed -1, got {potential.lam}")
    if isinstance(potential, CoulombPotential) and not potential.alpha_eff > 0.0:
        raise ParameterError("coulomb potential needs alpha_eff > 0 for bound states")
    if isinstance(potential, OscillatorPotential) and not potential.omega_eff > 0.0:
        raise ParameterError("oscillator potential needs omega_eff > 0")


def _tridiagonal(potential, grid: FdGrid, units: UnitScalars):
    r = grid.interior()
    h = grid.spacing
    kin = units.hbar ** 2 / (2.0 * units.mass * h * h)
    diag = 2.0 * kin + potential.u(r, units)
    off = np.full(r.size - 1, -kin)
    return diag, off


def fd_radial_eigen(potential, grid: FdGrid, k_lowest: int,
                    units: UnitScalars = NATURAL_UNITS) -> np.ndarray:
    """The k lowest eigenvalues of -hbar^2/2m d^2/dr^2 + U(r) on the grid."""
    _validate(potential)
    if k_lowest < 1:
        raise ParameterError("k_lowest must be >= 1")
    if k_lowest > grid.n_points - 2:
        raise GridError("k_lowest exceeds the number of interior nodes")
    diag, off = _tridiagonal(potential, grid, units)
    return eigh_tridiagonal(diag, off, eigvals_only=True,
                            select="i", select_range=(0, k_lowest - 1))


def _fd_eigen_pair(potential, grid: FdGrid, index: int, units: UnitScalars):
    """(eigenvalue, eigenvector) of the index-th lowest mode."""
    diag, off = _tridiagonal(potential, grid, units)
    vals, vecs = eigh_tridiagonal(diag, off, select="i",
                                  select_range=(index, index))
    return float(vals[0]), vecs[:, 0]


def _turning_radius(potential, e_target: float, units: UnitScalars) -> float:
    if isinstance(potential, OscillatorPotential):
        e = max(abs(e_target),
                units.hbar * potential.omega_eff * (abs(potential.lam) + 1.0))
        return math.sqrt(2.0 * e / units.mass) / potential.omega_eff
    return potential.alpha_eff / abs(e_target)


def auto_grid(potential, e_target: float, units: UnitScalars = NATURAL_UNITS,
              n_points: int = 4000) -> FdGrid:
    """Turning-point-based grid: r_max = 2.5 x r_turn (>= 2 by construction),
    r_min = 1e-4 of the state's length scale."""
    _validate(potential)
    r_turn = _turning_radius(potential, e_target, units)
    if isinstance(potential, OscillatorPotential):
        scale = math.sqrt(units.hbar / (units.mass * potential.omega_eff))
        r_max = 2.5 * r_turn
    else:
        q = math.sqrt(2.0 * units.mass * abs(e_target)) / units.hbar
        scale = 1.0 / q
        r_max = max(2.0 * r_turn, 30.0 / q)
    return FdGrid(1e-4 * scale, r_max, n_points)


def _tail_ok(vec: np.ndarray) -> bool:
    return abs(vec[-1]) <= _TAIL_LIMIT * np.max(np.abs(vec))


def self_consistent_level(spec: SpaceSpec, qn: QuantumNumbers,
                          grid: FdGrid | None = None, tol: float = 1e-8,
                          e_hint: float | None = None,
                          branch_signs=None,
                          scan_points_per_decade: int = 24) -> EnergyLevel | None:
    """Re-derive one quantization root from finite-difference eigenvalues.

    Brackets F(E) = delta*E - fd_eigenvalue_{n}(U_eff(.;E)) inside the validity
    window and bisects to ``tol`` (relative).  ``e_hint`` only localizes the
    bracket search (the root is still F's own zero); without it the window is
    scanned on a log grid.  Returns None when no bracket exists.
    """
    if spec.kind in (SpaceKind.KIV, SpaceKind.KV):
        raise KindError(f"{spec.kind.value} has no discrete levels to verify")
    if not tol > 0.0:
        raise ParameterError("tol must be positive")
    windows = validity_windows(spec, qn)
    if not windows:
        return None
    units = spec.units
    delta = spec.metric["delta"]

    def potential_at(E: float):
        idx = effective_indices(spec, qn, E, branch_signs)
        if not idx.all_real or idx.lambda2 is None or idx.lambda2 <= -1.0:
            return None, None
        family, n_red, lam = radial_reduction(spec, qn, idx)
        if family == "oscillator":
            if not (idx.omega_eff and idx.omega_eff > 0.0):
                return None, None
            return OscillatorPotential(lam, idx.omega_eff), n_red
        if idx.alpha_eff is None or idx.alpha_eff <= 0.0:
            return None, None
        return CoulombPotential(lam, idx.alpha_eff), n_red

    state = {"grid": grid}

    def f_of(E: float) -> float:
        pot, n_red = potential_at(E)
        if pot is None:
            return math.nan
        g = state["grid"]
        if g is None:
            g = auto_grid(pot, delta * E, units)
            state["grid"] = g
        vals = fd_radial_eigen(pot, g, n_red + 1, units)
        return delta * E - float(vals[n_red])

    def bracket_near(center: float, window) -> tuple | None:
        f0 = f_of(center)
        if math.isnan(f0):
            return None
        for widen in (0.02, 0.05, 0.15, 0.4, 0.9):
            lo = max(window.lower, center - widen * max(abs(center), 1.0))
            hi = min(window.upper, center + widen * max(abs(center), 1.0))
            flo, fhi = f_of(lo), f_of(hi)
            if not math.isnan(flo) and (flo < 0) != (f0 < 0):
                return lo, center, flo, f0
            if not math.isnan(fhi) and (f0 < 0) != (fhi < 0):
                return center, hi, f0, fhi
        return None

    def bracket_scan(window) -> tuple | None:
        lo = max(window.lower, -1e6)
        hi = min(window.upper, 1e6)
        from .spectra import _scan_grid  # same log-density sampling
        grid_e = _scan_grid(lo, hi, scan_points_per_decade)
        prev_e = prev_f = None
        best = None
        for e in grid_e:
            fe = f_of(e)
            if math.isnan(fe):
                prev_e = prev_f = None
                continue
            if prev_f is not None and (prev_f < 0) != (fe < 0):
                cand = (prev_e, e, prev_f, fe)
                if e_hint is None:
                    return cand
                mid = 0.5 * (prev_e + e)
                if best is None or abs(mid - e_hint) < abs(best[4] - e_hint):
                    best = cand + (mid,)
            prev_e, prev_f = e, fe
        return best[:4] if best else None

    found = None
    for wid, window in enumerate(windows):
        if e_hint is not None and window.contains(e_hint):
            found = bracket_near(e_hint, window)
        if found is None:
            found = bracket_scan(window)
        if found is not None:
            break
    if found is None:
        return None

    a, b, fa, fb = found
    for _ in range(200):
        mid = 0.5 * (a + b)
        if mid == a or mid == b:
            break
        fm = f_of(mid)
        if math.isnan(fm) or fm == 0.0:
            break
        if (fa < 0) != (fm < 0):
            b, fb = mid, fm
        else:
            a, fa = mid, fm
        if (b - a) <= tol * max(abs(mid), 1e-12):
            break
    root = 0.5 * (a + b)

    # enforce the turning-point/tail invariants on auto grids, then re-solve
    if grid is None:
        for _ in range(3):
            pot, n_red = potential_at(root)
            if pot is None:
                break
            val, vec = _fd_eigen_pair(pot, state["grid"], n_red, units)
            if _tail_ok(vec):
                break
            g = state["grid"]
            state["grid"] = replace(g, r_max=1.5 * g.r_max)
            a, b = root * 0.98, root * 1.02
            lo, hi = min(a, b), max(a, b)
            fa, fb = f_of(lo), f_of(hi)
            if (fa < 0) != (fb < 0):
                for _ in range(200):
                    mid = 0.5 * (lo + hi)
                    if mid == lo or mid == hi:
                        break
                    fm = f_of(mid)
                    if (fa < 0) != (fm < 0):
                        hi, fb = mid, fm
                    else:
                        lo, fa = mid, fm
                    if (hi - lo) <= tol * max(abs(mid), 1e-12):
                        break
                root = 0.5 * (lo + hi)

    wid = next(i for i, w in enumerate(windows) if w.contains(root))
    return EnergyLevel(root, f_of(root), qn,
                       effective_indices(spec, qn, root, branch_signs).branch_signs,
                       wid, Provenance.ORACLE)


@dataclass(frozen=True)
class MatchedPair:
    energy_a: float
    energy_b: float
    rel_deviation: float


@dataclass(frozen=True)
class MatchReport:
    pairs: tuple[MatchedPair, ...]
    unmatched_a: tuple[float, ...]
    unmatched_b: tuple[float, ...]
    max_rel_deviation: float

    @property
    def all_matched(self) -> bool:
        return not self.unmatched_a and not self.unmatched_b

    def to_dict(self) -> dict:
        return {
            "pairs": [{"energy_a": p.energy_a, "energy_b": p.energy_b,
                       "rel_deviation": p.rel_deviation} for p in self.pairs],
            "unmatched_a": list(self.unmatched_a),
            "unmatched_b": list(self.unmatched_b),
            "max_rel_deviation": self.max_rel_deviation,
        }


def compare(levels_a, levels_b, rel_tol: float) -> MatchReport:
    """Nearest-energy pairing of two sorted level lists within rel_tol."""
    ea = [lv.energy if isinstance(lv, EnergyLevel) else float(lv) for lv in levels_a]
    eb = [lv.energy if isinstance(lv, EnergyLevel) else float(lv) for lv in levels_b]
    used = [False] * len(eb)
    pairs = []
    unmatched_a = []
    for a in ea:
        best_j, best_dev = None, math.inf
        for j, b in enumerate(eb):
            if used[j]:
                continue
            dev = abs(a - b) / max(abs(a), abs(b), 1e-300)
            if dev < best_dev:
                best_j, best_dev = j, dev
        if best_j is not None and best_dev <= rel_tol:
            used[best_j] = True
            pairs.append(MatchedPair(a, eb[best_j], best_dev))
        else:
            unmatched_a.append(a)
    unmatched_b = [b for j, b in enumerate(eb) if not used[j]]
    max_dev = max((p.rel_deviation for p in pairs), default=0.0)
    return MatchReport(tuple(pairs), tuple(unmatched_a), tuple(unmatched_b), max_dev)
