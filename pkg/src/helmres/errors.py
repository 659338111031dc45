"""Exception types shared across the package."""


class HelmresError(Exception):
    """Base class for all package-specific errors."""


class DomainError(HelmresError):
    """Input outside the mathematical domain of a function (e.g. H_nu at 0)."""


class RangeError(HelmresError):
    """Input outside the supported evaluation range (overflow territory)."""


class SingularDenominatorError(HelmresError):
    """A Hankel-function denominator vanishes at the evaluation point.

    Signals that the point sits on (or within tolerance of) a pole of the
    DtN symbol and that pole cancellation is required.
    """

    def __init__(self, message, nu=None, location=None):
        super().__init__(message)
        self.nu = nu
        self.location = location


class PoleEvaluationError(HelmresError):
    """Evaluation of T(lam) requested at a pole of the DtN nonlinearity."""

    def __init__(self, message, nu=None):
        super().__init__(message)
        self.nu = nu


class FactorizationError(HelmresError):
    """T(mu) is numerically singular or too close to a known pole."""


class GeometryError(HelmresError):
    """Invalid geometry configuration (resonator touching the DtN circle, ...)."""


class MeshError(HelmresError):
    """Invalid mesh (negative Jacobian, nonconforming cells, ...)."""


class ConfigError(HelmresError):
    """Malformed or inconsistent run configuration."""


class ConvergenceError(HelmresError):
    """An iteration failed to converge within its step budget."""
