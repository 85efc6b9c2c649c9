"""Exception types raised across the package."""


class BoostProbeError(Exception):
    """Base class for all package errors."""


class DimensionOverflowError(BoostProbeError):
    """Requested Fock space exceeds the configured dimension cap."""


class FillingMismatchError(BoostProbeError, ValueError):
    pass


class BasisMismatchError(BoostProbeError, ValueError):
    pass


class DimensionMismatchError(BoostProbeError, ValueError):
    pass


class NumericalError(BoostProbeError):
    """Base for failures of iterative numerics (CLI exit code 3)."""


class ConvergenceError(NumericalError):
    pass


class StepSizeUnderflowError(NumericalError):
    pass


class BandIdentificationError(NumericalError):
    pass


class NoPeakError(NumericalError):
    """Periodogram has no usable nonzero-frequency peak."""


class DegenerateFitError(BoostProbeError, ValueError):
    pass


class CalibrationError(BoostProbeError, ValueError):
    pass


class ZeroCouplingError(BoostProbeError, ValueError):
    pass


class ConfigError(BoostProbeError, ValueError):
    """Invalid scenario configuration (CLI exit code 2)."""
