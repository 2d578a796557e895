"""Exception types shared across the package."""


class KoenigsError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(KoenigsError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ParameterError(KoenigsError, ValueError):
    """A parameter violates a precondition (e.g. an orthogonality index <= -1)."""


class SingularPointError(KoenigsError, ValueError):
    """Evaluation was requested on (or too close to) a singular axis of the metric."""


class NonPositiveMetricError(KoenigsError, ValueError):
    """The conformal factor f is not positive at the requested point."""


class OutOfWindowError(KoenigsError, ValueError):
    """An energy lies outside every validity window of the quantization condition."""


class KindError(KoenigsError, ValueError):
    """The requested operation is not defined for this space kind."""


class PatternMismatchError(KoenigsError, ValueError):
    """A closed-form special case was requested for constants that do not match it."""


class ChartError(KoenigsError, ValueError):
    """The requested coordinate chart is not supported for this space kind."""


class AccuracyError(KoenigsError, RuntimeError):
    """A quadrature or solver failed to reach its required accuracy."""


class ConfigError(KoenigsError, ValueError):
    """Invalid run or solver configuration."""


class GridError(KoenigsError, ValueError):
    """A finite-difference grid violates its invariants."""
