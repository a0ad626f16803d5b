"""Exception types shared across the package."""


class QstsimError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(QstsimError, ValueError):
    """Operands live on incompatible Hilbert spaces."""


class ParameterError(QstsimError, ValueError):
    """A physical parameter is missing, zero where forbidden, or out of range."""


class NonOscillatoryRegimeError(QstsimError, ValueError):
    """The oscillation-frequency radicand is negative; no coherent transfer."""


class DegenerateSpectrumError(QstsimError, ValueError):
    """The two-level splitting vanishes; closed forms are singular."""


class OverdampedRegimeError(QstsimError, ValueError):
    """Dephasing imbalance exceeds the coupling; the damped frequency is imaginary."""


class ResonanceSolveError(QstsimError, ValueError):
    """No real solution for the requested free symbol keeps signs consistent."""


class SolverError(QstsimError, RuntimeError):
    """Numerical integration failed or did not meet the requested tolerance."""


class CalibrationError(QstsimError, ValueError):
    """Root finding for a dephasing constant failed within the physical bracket."""


class ConfigError(QstsimError, ValueError):
    """A scenario configuration is malformed."""


class AccuracyWarning(UserWarning):
    """A closed form is being evaluated outside its stated validity regime."""
