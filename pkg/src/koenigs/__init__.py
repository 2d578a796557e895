"""Bound-state spectra and wave-functions on the five Koenigs spaces.

A Koenigs space divides a flat three-dimensional Hamiltonian by a maximally
superintegrable potential, turning it into a metric factor of a space of
non-constant curvature.  This package evaluates the resulting quantum
curvature corrections, solves the transcendental quantization conditions of
the three kinds that admit bound states, assembles and normalizes the
special-function wave-functions, and cross-checks every root against an
independent finite-difference Sturm-Liouville eigensolver.
"""

from .errors import (
    AccuracyError,
    ChartError,
    ConfigError,
    DomainError,
    GridError,
    KindError,
    KoenigsError,
    NonPositiveMetricError,
    OutOfWindowError,
    ParameterError,
    PatternMismatchError,
    SingularPointError,
)
from .spaces import (
    NATURAL_UNITS,
    Point3,
    SpaceKind,
    SpaceSpec,
    UnitScalars,
    delta_v_split,
    delta_v_total,
    grad_log_sqrt_g,
    h_decomposition,
    metric_factor,
)
from .spectra import (
    EffectiveIndices,
    EnergyLevel,
    Provenance,
    QuantumNumbers,
    Scheme,
    SolverConfig,
    SpectrumType,
    ValidityWindow,
    closed_form_special,
    effective_indices,
    quantization_residual,
    solve_levels,
    spectrum_type,
    validity_windows,
)
from .wavefunctions import (
    BoundState,
    Chart,
    QuadratureConfig,
    assemble,
    evaluate,
    normalize,
    ode_residual,
)
from .oracle import (
    CoulombPotential,
    FdGrid,
    MatchReport,
    OscillatorPotential,
    compare,
    fd_radial_eigen,
    self_consistent_level,
)

__version__ = "0.1.0"
