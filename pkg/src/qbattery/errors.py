"""Exception types shared across the package."""


class QBatteryError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(QBatteryError):
    """Configuration document is malformed or violates a model invariant."""


class SingularDenominator(QBatteryError):
    """Counterdiabatic denominator vanishes (zero detuning and zero decay)."""


class DegenerateSpectrum(QBatteryError):
    """Instantaneous spectrum has a gap below tolerance; eigenstate tracking undefined."""


class GridTooCoarse(QBatteryError):
    """Adjacent eigenvectors overlap too little for reliable gauge tracking."""


class StepTooLarge(QBatteryError):
    """Integrator step exceeds the stability/accuracy cap for these parameters."""


class InvariantViolation(QBatteryError):
    """A state sample broke a physicality invariant beyond tolerance."""


class TruncationLeak(QBatteryError):
    """Population reached the top Fock levels; truncated results untrustworthy."""


class UnphysicalState(QBatteryError):
    """Moment data violates Gaussian physicality (M below 1)."""


class DecompositionMismatch(QBatteryError):
    """Thermal/coherent decomposition identity failed beyond tolerance."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class ResonantEnvelope(QBatteryError):
    """Envelope frequency hits the resonant denominator of the closed-form trajectory."""
