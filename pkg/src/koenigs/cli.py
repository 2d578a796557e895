"""Command-line interface.

Subcommands: ``solve``, ``special-cases``, ``deltav``, ``verify``,
``wavefunction``, ``info``.  All numerical subcommands read a JSON run
configuration (schema below, validated with unknown keys rejected) and write
CSV or JSON; floats are printed with 17 significant digits so that round-trips
are lossless.  Exit codes: 0 success, 1 configuration error, 2 empty spectrum
or unsolved selector, 3 continuous-only space kind, 4 verification mismatch.

Config schema::

    {
      "space": {"kind": "KI", "metric": {...}, "potential": {...},
                "units": {"hbar": 1.0, "mass": 1.0}},
      "units": {...},                      # alternative to space.units
      "quantum_numbers": {"scheme": "polar",
                          "n_r": 0 | [lo, hi], "n_theta": 0, "n_phi": 0}
                         | {"scheme": "polar", "N": [0, 4]},
      "solver": {"scan_points_per_decade": 10000, "tol_rel": 1e-13,
                 "e_max_abs": 1e6, "dedupe_rel": 1e-9,
                 "branch_signs": "k1=+,k2=+"},
      "output": {"format": "csv" | "json", "path": "out.csv"},
      "sampling": {"count": 200, "r_min": ..., "r_max": ...,
                   "theta": ..., "phi": ..., "z": ...},
      "case": "ki-oscillator-only"
    }

Levels with an ``N`` range expand with the remaining labels zero (for KIII,
n_r = N - 2).  Natural units (hbar = m = 1) are the default.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import replace

import numpy as np

from . import oracle, spaces, spectra, wavefunctions
from .errors import KoenigsError, ConfigError
from .spaces import Point3, SpaceKind, SpaceSpec
from .spectra import QuantumNumbers, Scheme, SolverConfig, SpectrumType

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_EMPTY = 2
EXIT_CONTINUOUS = 3
EXIT_MISMATCH = 4

_CSV_VERSION_LINE = "# koenigs-csv v1"

_SCHEME_LABELS = {
    Scheme.POLAR: ("n_r", "n_theta", "n_phi"),
    Scheme.CARTESIAN: ("n_x", "n_y", "n_z"),
    Scheme.COULOMB: ("n_r", "l", "n_phi"),
}

# Separating coordinate systems of the five maximally superintegrable
# potentials; True marks the systems in which a closed solution exists.
SEPARABILITY = {
    "V1": ("isotropic singular oscillator", SpaceKind.KI, (
        ("Cartesian", True), ("Spherical", True), ("Circular Polar", True),
        ("Circular Elliptic", False), ("Conical", False),
        ("Oblate Spheroidal", False), ("Prolate Spheroidal", False),
        ("Ellipsoidal", False))),
    "V2": ("Holt potential (1:1:2 singular oscillator)", SpaceKind.KII, (
        ("Cartesian", True), ("Parabolic", False), ("Circular Polar", True),
        ("Circular Elliptic", False))),
    "V3": ("Coulomb potential with inverse-square terms", SpaceKind.KIII, (
        ("Conical", False), ("Spherical", True), ("Parabolic", True),
        ("Prolate Spheroidal II", False))),
    "V4": ("centrifugal potential", SpaceKind.KIV, (
        ("Spherical", True), ("Circular Elliptic II", False),
        ("Circular Parabolic", True), ("Circular Polar", True))),
    "V5": ("linear-centrifugal potential", SpaceKind.KV, (
        ("Circular Polar", True), ("Circular Elliptic II", False),
        ("Circular Parabolic", True), ("Parabolic", False))),
}

_KIND_TO_POTENTIAL = {v[1]: k for k, v in SEPARABILITY.items()}


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _write_rows(path: str | None, columns, rows, fmt: str) -> None:
    if fmt == "json":
        payload = {"version": "koenigs-v1",
                   "rows": [dict(zip(columns, r)) for r in rows]}
        text = json.dumps(payload, indent=2, default=_fmt) + "\n"
    else:
        buf = io.StringIO()
        buf.write(_CSV_VERSION_LINE + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for r in rows:
            writer.writerow([_fmt(v) for v in r])
        text = buf.getvalue()
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    allowed = {"space", "units", "quantum_numbers", "solver", "output",
               "sampling", "case", "chart"}
    unknown = set(cfg) - allowed
    if unknown:
        raise ConfigError(f"config: unknown keys {sorted(unknown)}")
    if "space" not in cfg:
        raise ConfigError("config: missing 'space'")
    return cfg


def _space_from_config(cfg: dict) -> SpaceSpec:
    space = dict(cfg["space"])
    if "units" in cfg:
        if "units" in space:
            raise ConfigError("units given both at top level and inside space")
        space["units"] = cfg["units"]
    return SpaceSpec.from_dict(space)


def _parse_branch(text) -> tuple[int, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(int(s) for s in text)
    signs = {"k1": 1, "k2": 1, "k3": 1}
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ConfigError(f"branch spec {part!r} is not of the form k1=+")
        key, val = (s.strip() for s in part.split("=", 1))
        if key not in signs or val not in ("+", "-"):
            raise ConfigError(f"branch spec {part!r}: keys k1,k2,k3; values +,-")
        signs[key] = 1 if val == "+" else -1
    return (signs["k1"], signs["k2"], signs["k3"])


def _solver_from_config(cfg: dict, args) -> SolverConfig:
    raw = dict(cfg.get("solver", {}))
    allowed = {"scan_points_per_decade", "tol_rel", "e_max_abs", "dedupe_rel",
               "branch_signs"}
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigError(f"solver: unknown keys {sorted(unknown)}")
    if "branch_signs" in raw:
        raw["branch_signs"] = _parse_branch(raw["branch_signs"])
    if getattr(args, "scan_density", None) is not None:
        raw["scan_points_per_decade"] = args.scan_density
    if getattr(args, "tol_rel", None) is not None:
        raw["tol_rel"] = args.tol_rel
    if getattr(args, "e_max", None) is not None:
        raw["e_max_abs"] = args.e_max
    if getattr(args, "branch", None) is not None:
        raw["branch_signs"] = _parse_branch(args.branch)
    return SolverConfig(**raw)


def _expand_qn(cfg: dict, kind: SpaceKind) -> list[QuantumNumbers]:
    raw = cfg.get("quantum_numbers")
    if raw is None:
        raise ConfigError("config: missing 'quantum_numbers'")
    raw = dict(raw)
    scheme = Scheme(raw.pop("scheme", "polar"))
    labels = _SCHEME_LABELS[scheme]

    def as_range(v, what):
        if isinstance(v, int):
            return [v]
        if (isinstance(v, list) and len(v) == 2
                and all(isinstance(x, int) for x in v)):
            if v[0] > v[1]:
                raise ConfigError(f"{what}: empty range {v}")
            return list(range(v[0], v[1] + 1))
        raise ConfigError(f"{what} must be an integer or [lo, hi], got {v!r}")

    if "N" in raw:
        extra = set(raw) - {"N"}
        if extra:
            raise ConfigError(f"quantum_numbers: give either N or labels, "
                              f"not both ({sorted(extra)})")
        out = []
        for n in as_range(raw["N"], "N"):
            if kind is SpaceKind.KIII:
                if n < 2:
                    raise ConfigError("KIII aggregate N starts at 2")
                out.append(QuantumNumbers.coulomb(n - 2, 0, 0))
            elif kind is SpaceKind.KII:
                out.append(QuantumNumbers.cartesian(0, 0, n)
                           if scheme is Scheme.CARTESIAN
                           else QuantumNumbers.polar(0, n, 0))
            else:
                out.append(QuantumNumbers(scheme, (n, 0, 0)))
        return out

    unknown = set(raw) - set(labels)
    if unknown:
        raise ConfigError(f"quantum_numbers: unknown keys {sorted(unknown)} "
                          f"for scheme {scheme.value!r} (labels: {labels})")
    ranges = [as_range(raw.get(lbl, 0), lbl) for lbl in labels]
    total = np.prod([len(r) for r in ranges])
    if total > 2048:
        raise ConfigError(f"quantum number expansion of {total} combinations "
                          "exceeds the 2048 cap")
    out = []
    for a in ranges[0]:
        for b in ranges[1]:
            for c in ranges[2]:
                out.append(QuantumNumbers(scheme, (a, b, c)))
    return out


def _output_args(cfg: dict, args):
    out = dict(cfg.get("output", {}))
    unknown = set(out) - {"format", "path"}
    if unknown:
        raise ConfigError(f"output: unknown keys {sorted(unknown)}")
    fmt = args.format or out.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"output format must be csv or json, got {fmt!r}")
    return out.get("path") if args.out is None else args.out, fmt


def _continuous_message(spec: SpaceSpec) -> str:
    return (f"{spec.kind.value}: classification {SpectrumType.CONTINUOUS_ONLY.value}; "
            "this space kind supports only a continuous energy spectrum, "
            "so there are no discrete levels to solve.")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_solve(args) -> int:
    cfg = _load_config(args.config)
    spec = _space_from_config(cfg)
    if spectra.spectrum_type(spec) is SpectrumType.CONTINUOUS_ONLY:
        print(_continuous_message(spec), file=sys.stderr)
        return EXIT_CONTINUOUS
    solver = _solver_from_config(cfg, args)
    path, fmt = _output_args(cfg, args)
    columns = ("kind", "scheme", "n1", "n2", "n3", "N", "branch_signs",
               "energy", "residual", "window_id", "provenance")
    rows = []
    for qn in _expand_qn(cfg, spec.kind):
        for lv in spectra.solve_levels(spec, qn, solver):
            rows.append((spec.kind.value, qn.scheme.value, *qn.labels,
                         qn.aggregate_n(spec.kind),
                         "".join("+" if s > 0 else "-" for s in lv.branch_signs),
                         lv.energy, lv.residual, lv.window_id,
                         lv.provenance.value))
    _write_rows(path, columns, rows, fmt)
    if not rows:
        print("empty spectrum: no admissible root in any validity window",
              file=sys.stderr)
        return EXIT_EMPTY
    return EXIT_OK


def cmd_special_cases(args) -> int:
    cfg = _load_config(args.config)
    spec = _space_from_config(cfg)
    case = args.case or cfg.get("case")
    if not case:
        raise ConfigError("no special case given (--case or config 'case')")
    solver = _solver_from_config(cfg, args)
    if case in (spectra.KIII_METRIC_ONLY, spectra.KIII_COULOMB_METRIC_UPPER,
                spectra.KIII_COULOMB_METRIC_LOWER):
        solver = replace(solver, branch_signs=(-1, -1, 1))
    path, fmt = _output_args(cfg, args)
    columns = ("case", "kind", "scheme", "n1", "n2", "n3", "N",
               "closed_form", "solver_root", "rel_deviation")
    rows = []
    for qn in _expand_qn(cfg, spec.kind):
        closed = spectra.closed_form_special(spec, case, qn)
        solved = spectra.solve_levels(spec, qn, solver)
        root = min((lv.energy for lv in solved),
                   key=lambda e: abs(e - closed.energy), default=math.nan)
        dev = (abs(root - closed.energy) / max(abs(closed.energy), 1e-300)
               if math.isfinite(root) else math.nan)
        rows.append((case, spec.kind.value, qn.scheme.value, *qn.labels,
                     qn.aggregate_n(spec.kind), closed.energy, root, dev))
    _write_rows(path, columns, rows, fmt)
    return EXIT_OK


def _read_points(path: str) -> list[Point3]:
    pts = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p for p in line.replace(",", " ").split() if p]
            if parts[0].lower() in ("x", "point"):
                continue  # header row
            if len(parts) != 3:
                raise ConfigError(f"points file: expected 3 columns, got {line!r}")
            pts.append(Point3(*(float(p) for p in parts)))
    if not pts:
        raise ConfigError("points file contains no points")
    return pts


def cmd_deltav(args) -> int:
    cfg = _load_config(args.config)
    spec = _space_from_config(cfg)
    path, fmt = _output_args(cfg, args)
    columns = ("x", "y", "z", "f", "dv1", "dv2",
               "dv_total_analytic", "dv_total_numeric", "status")
    rows = []
    for p in _read_points(args.points):
        try:
            f = spaces.metric_factor(spec, p)
            dv1, dv2 = spaces.delta_v_split(spec, p)
            tot_a = spaces.delta_v_total(spec, p, "analytic")
            tot_n = spaces.delta_v_total(spec, p, "numeric")
            rows.append((*p, f, dv1, dv2, tot_a, tot_n, "ok"))
        except KoenigsError as exc:
            rows.append((*p, math.nan, math.nan, math.nan, math.nan, math.nan,
                         f"error: {exc}"))
    _write_rows(path, columns, rows, fmt)
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _load_config(args.config)
    spec = _space_from_config(cfg)
    if spectra.spectrum_type(spec) is SpectrumType.CONTINUOUS_ONLY:
        print(_continuous_message(spec), file=sys.stderr)
        return EXIT_CONTINUOUS
    solver = _solver_from_config(cfg, args)
    rel_tol = args.rel_tol
    detail = []
    solver_levels = []
    oracle_levels = []
    for qn in _expand_qn(cfg, spec.kind):
        for lv in spectra.solve_levels(spec, qn, solver):
            solver_levels.append(lv)
            ora = oracle.self_consistent_level(
                spec, qn, tol=1e-8, e_hint=lv.energy,
                branch_signs=solver.branch_signs)
            entry = {"labels": list(qn.labels), "scheme": qn.scheme.value,
                     "solver_energy": lv.energy}
            if ora is None:
                entry["oracle_energy"] = None
            else:
                oracle_levels.append(ora)
                entry["oracle_energy"] = ora.energy
                entry["rel_deviation"] = (abs(ora.energy - lv.energy)
                                          / max(abs(lv.energy), 1e-300))
            detail.append(entry)
    report = oracle.compare(solver_levels, oracle_levels, rel_tol)
    ok = report.all_matched and report.max_rel_deviation <= rel_tol
    payload = {
        "kind": spec.kind.value,
        "rel_tol": rel_tol,
        "grid": {"n_points": args.grid_points, "policy": "auto turning-point"},
        "levels": detail,
        "comparison": report.to_dict(),
        "verdict": "ok" if ok else "mismatch",
    }
    text = json.dumps(payload, indent=2) + "\n"
    path, _ = _output_args(cfg, args)
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not solver_levels:
        print("empty spectrum: nothing to verify", file=sys.stderr)
        return EXIT_EMPTY
    return EXIT_OK if ok else EXIT_MISMATCH


_DEFAULT_CHART = {
    (SpaceKind.KI, Scheme.POLAR): wavefunctions.Chart.SPHERICAL,
    (SpaceKind.KI, Scheme.CARTESIAN): wavefunctions.Chart.CARTESIAN,
    (SpaceKind.KII, Scheme.CARTESIAN): wavefunctions.Chart.CARTESIAN,
    (SpaceKind.KII, Scheme.POLAR): wavefunctions.Chart.CIRCULAR_POLAR,
    (SpaceKind.KIII, Scheme.COULOMB): wavefunctions.Chart.SPHERICAL,
}


def cmd_wavefunction(args) -> int:
    cfg = _load_config(args.config)
    spec = _space_from_config(cfg)
    if spectra.spectrum_type(spec) is SpectrumType.CONTINUOUS_ONLY:
        print(_continuous_message(spec), file=sys.stderr)
        return EXIT_CONTINUOUS
    solver = _solver_from_config(cfg, args)
    qns = _expand_qn(cfg, spec.kind)
    if len(qns) != 1:
        raise ConfigError("wavefunction sampling needs exactly one label set")
    levels = spectra.solve_levels(spec, qns[0], solver)
    if not levels or not 0 <= args.level_index < len(levels):
        print(f"unsolved selector: {len(levels)} level(s) found, "
              f"index {args.level_index} requested", file=sys.stderr)
        return EXIT_EMPTY
    level = levels[args.level_index]
    chart = wavefunctions.Chart(cfg.get("chart",
                                        _DEFAULT_CHART[(spec.kind, qns[0].scheme)]))
    state = wavefunctions.assemble(spec, level, chart)
    wavefunctions.normalize(spec, state)
    residual = wavefunctions.ode_residual(spec, state)

    samp = dict(cfg.get("sampling", {}))
    unknown = set(samp) - {"count", "r_min", "r_max", "theta", "phi", "z"}
    if unknown:
        raise ConfigError(f"sampling: unknown keys {sorted(unknown)}")
    count = int(samp.get("count", 200))
    fam, n_red, lam = spectra.radial_reduction(spec, level.qn, state.indices)
    if fam == "oscillator":
        scale = math.sqrt(spec.units.hbar
                          / (spec.units.mass * state.indices.omega_eff))
        default_max = 3.0 * scale * math.sqrt(2.0 * n_red + lam + 1.0)
    else:
        default_max = 3.0 * (n_red + lam + 0.5) ** 2 * state.coulomb_scale
    r_lo = float(samp.get("r_min", 0.02 * default_max))
    r_hi = float(samp.get("r_max", default_max))
    theta = float(samp.get("theta", 0.7))
    phi = float(samp.get("phi", 0.7))
    zval = float(samp.get("z", r_hi / 3.0))

    rows = []
    if chart is wavefunctions.Chart.SPHERICAL:
        coords = lambda r: (r, theta, phi)
        colnames = ("r", "theta", "phi")
    elif chart is wavefunctions.Chart.CIRCULAR_POLAR:
        coords = lambda r: (r, phi, zval)
        colnames = ("rho", "phi", "z")
    else:
        coords = lambda r: (r, r, r)  # main-diagonal ray
        colnames = ("x", "y", "z")
    for r in np.linspace(r_lo, r_hi, count):
        c = coords(float(r))
        val = wavefunctions.evaluate(state, c)
        rows.append((*c, val, val * val))

    path, fmt = _output_args(cfg, args)
    columns = (*colnames, "psi", "abs2")
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(_CSV_VERSION_LINE + "\n")
        buf.write(f"# kind={spec.kind.value} chart={chart.value} "
                  f"labels={level.qn.labels}\n")
        buf.write(f"# energy={level.energy:.17g}\n")
        buf.write(f"# norm_const={state.norm_const:.17g}\n")
        buf.write(f"# ode_residual={residual:.17g}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for r in rows:
            writer.writerow([_fmt(v) for v in r])
        text = buf.getvalue()
        if path:
            with open(path, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    else:
        payload = {"version": "koenigs-v1", "kind": spec.kind.value,
                   "chart": chart.value, "labels": list(level.qn.labels),
                   "energy": level.energy, "norm_const": state.norm_const,
                   "ode_residual": residual,
                   "rows": [dict(zip(columns, r)) for r in rows]}
        text = json.dumps(payload, indent=2) + "\n"
        if path:
            with open(path, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return EXIT_OK


def cmd_info(args) -> int:
    ident = args.id.upper().replace("_", "").replace("-", "")
    alias = {"KI": "V1", "KII": "V2", "KIII": "V3", "KIV": "V4", "KV": "V5"}
    key = alias.get(ident, ident)
    if key not in SEPARABILITY:
        print(f"unknown potential/space id {args.id!r}; "
              f"known: V1..V5, KI..KV", file=sys.stderr)
        return EXIT_CONFIG
    name, kind, systems = SEPARABILITY[key]
    print(f"{key} ({kind.value}): {name}")
    print(f"spectrum: {spectra.spectrum_type(SpaceSpec(kind)).value}")
    print("separating coordinate systems (* = closed solution):")
    for system, solvable in systems:
        mark = " *" if solvable else ""
        print(f"  {system}{mark}")
    return EXIT_OK


# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="koenigs",
        description="Bound-state spectra and wave-functions on the five "
                    "conformally-flat Koenigs spaces")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, help="JSON run config")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=None)

    def add_solver_flags(p):
        p.add_argument("--tol-rel", type=float, default=None)
        p.add_argument("--scan-density", type=int, default=None,
                       help="scan samples per energy decade")
        p.add_argument("--e-max", type=float, default=None,
                       help="window truncation |E| bound")
        p.add_argument("--branch", default=None, help="e.g. k1=+,k2=-")

    p = sub.add_parser("solve", help="solve the quantization condition")
    add_common(p)
    add_solver_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("special-cases", help="closed forms vs solver roots")
    add_common(p)
    add_solver_flags(p)
    p.add_argument("--case", default=None,
                   help=f"one of {', '.join(spectra.SPECIAL_CASES)}")
    p.set_defaults(func=cmd_special_cases)

    p = sub.add_parser("deltav", help="curvature corrections at given points")
    add_common(p)
    p.add_argument("--points", required=True, help="CSV/whitespace x y z file")
    p.set_defaults(func=cmd_deltav)

    p = sub.add_parser("verify", help="finite-difference oracle cross-check")
    add_common(p)
    add_solver_flags(p)
    p.add_argument("--rel-tol", type=float, default=1e-4)
    p.add_argument("--grid-points", type=int, default=4000)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("wavefunction", help="sample a bound-state wave-function")
    add_common(p)
    add_solver_flags(p)
    p.add_argument("--level-index", type=int, default=0,
                   help="root index when a label set has several")
    p.set_defaults(func=cmd_wavefunction)

    p = sub.add_parser("info", help="separability metadata for V1..V5 / KI..KV")
    p.add_argument("id")
    p.set_defaults(func=cmd_info)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except KoenigsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
