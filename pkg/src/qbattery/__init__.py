"""Open quantum battery charging with counterdiabatic drive shaping.

Three mutually validating computation paths: closed Gaussian moment
equations (the workhorse), closed-form zero-temperature amplitudes (a
cross-check), and brute-force truncated-Fock density-matrix propagation
(the oracle).
"""

from .analytic import (
    AnalyticCoefficients,
    ValidationReport,
    alpha_analytic,
    beta_analytic,
    coefficients,
    validate_against_numerics,
)
from .cd_control import (
    CdDriveSample,
    HermitianTrajectorySample,
    cd_field,
    cd_hamiltonian_closed,
    drive_field,
    propagate_unitary,
    steady_displacement,
)
from .dynamics import MomentState, Trajectory, integrate, max_step, moment_rhs
from .energetics import (
    DecompositionResult,
    EnergyReport,
    decompose,
    energy_a,
    energy_b,
    ergotropy_b,
    gaussian_m,
)
from .errors import (
    ConfigError,
    DecompositionMismatch,
    DegenerateSpectrum,
    GridTooCoarse,
    InvariantViolation,
    QBatteryError,
    ResonantEnvelope,
    SingularDenominator,
    StepTooLarge,
    TruncationLeak,
    UnphysicalState,
)
from .model import DriveKind, DriveProfile, ModelParams, bose_occupation, coupling_window, envelope
from .oracle import DenseState, DenseTrajectory, dense_evolve, extract_moments

__version__ = "0.1.0"

__all__ = [
    "AnalyticCoefficients",
    "CdDriveSample",
    "ConfigError",
    "DecompositionMismatch",
    "DecompositionResult",
    "DegenerateSpectrum",
    "DenseState",
    "DenseTrajectory",
    "DriveKind",
    "DriveProfile",
    "EnergyReport",
    "GridTooCoarse",
    "HermitianTrajectorySample",
    "InvariantViolation",
    "ModelParams",
    "MomentState",
    "QBatteryError",
    "ResonantEnvelope",
    "SingularDenominator",
    "StepTooLarge",
    "Trajectory",
    "TruncationLeak",
    "UnphysicalState",
    "ValidationReport",
    "alpha_analytic",
    "beta_analytic",
    "bose_occupation",
    "cd_field",
    "cd_hamiltonian_closed",
    "coefficients",
    "coupling_window",
    "decompose",
    "dense_evolve",
    "drive_field",
    "energy_a",
    "energy_b",
    "envelope",
    "ergotropy_b",
    "extract_moments",
    "gaussian_m",
    "integrate",
    "max_step",
    "moment_rhs",
    "propagate_unitary",
    "steady_displacement",
    "validate_against_numerics",
]
