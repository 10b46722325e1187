"""Exception types shared across the package."""


class CurveCurrentsError(Exception):
    """Base class for all package-specific errors."""


class NonConvergentError(CurveCurrentsError):
    """A principal-value exclusion sequence failed its Cauchy criterion.

    Signals an integrand whose non-integrable part has nonzero angular
    mean, i.e. no principal value exists.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace) if trace is not None else []


class DivergingLimitError(CurveCurrentsError):
    """A regularized trace grows as the cutoff scale shrinks.

    Carries the estimated growth exponent ``p`` with ``value ~ delta**(-p)``.
    """

    def __init__(self, message, growth=None, trace=None):
        super().__init__(message)
        self.growth = growth
        self.trace = list(trace) if trace is not None else []


class PoleAtDiagonalError(CurveCurrentsError):
    """Kernel evaluated at a point of its diagonal singularity."""


class DenominatorVanishesError(CurveCurrentsError):
    """Weight denominator |zeta|^2 - conj(zeta).z vanished."""


class InconsistentBranchesError(CurveCurrentsError):
    """The two divided-difference branches of a curve kernel disagree
    where both are well conditioned; indicates a bug or bad orientation."""


class JetOrderError(CurveCurrentsError):
    """Jet order too small to express the requested target."""

    def __init__(self, message, required_order=None):
        super().__init__(message)
        self.required_order = required_order
