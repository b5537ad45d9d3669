"""Closed moment equations of the driven, damped two-oscillator system.

The Gaussian dynamics is captured exactly by two first moments and six
second moments. Their equations of motion follow from the adjoint master
equation with drive Hamiltonian F(t) a^dag + F*(t) a and single-mode
damping/pumping on the charger; the three quadrature moments <a^2>, <b^2>,
<ab> close the set needed by the ergotropy formula. With a complex
counterdiabatic field the drive term in d<a^dag a>/dt carries the conjugate
field, -2 Im[F* <a>]; the brute-force density-matrix oracle pins this
convention down.
"""

import math
from dataclasses import dataclass

import numpy as np

from .cd_control import drive_field
from .errors import InvariantViolation, StepTooLarge
from .model import DriveKind, DriveProfile, ModelParams, coupling_window

__all__ = ["MomentState", "Trajectory", "integrate", "max_step", "moment_rhs"]

#: absolute tolerance for physicality checks on stored samples
PHYSICALITY_TOL = 1e-9

# layout of the internal state vector
_A, _B, _NA, _NB, _ABD, _A2, _B2, _AB = range(8)


@dataclass(frozen=True)
class MomentState:
    """First and second moments of the joint charger/battery Gaussian state."""

    a_mean: complex = 0j
    b_mean: complex = 0j
    na: float = 0.0
    nb: float = 0.0
    ab_dag: complex = 0j
    a_sq: complex = 0j
    b_sq: complex = 0j
    ab: complex = 0j

    @classmethod
    def vacuum(cls) -> "MomentState":
        return cls()

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.a_mean, self.b_mean, self.na, self.nb, self.ab_dag, self.a_sq, self.b_sq, self.ab],
            dtype=complex,
        )

    @classmethod
    def from_array(cls, y: np.ndarray) -> "MomentState":
        return cls(
            a_mean=complex(y[_A]),
            b_mean=complex(y[_B]),
            na=float(y[_NA].real),
            nb=float(y[_NB].real),
            ab_dag=complex(y[_ABD]),
            a_sq=complex(y[_A2]),
            b_sq=complex(y[_B2]),
            ab=complex(y[_AB]),
        )

    def validate(self, tol: float = PHYSICALITY_TOL) -> None:
        """Raise :class:`InvariantViolation` if physicality fails beyond ``tol``."""
        if self.na < -tol or self.nb < -tol:
            raise InvariantViolation(f"negative occupation: na={self.na}, nb={self.nb}")
        if self.na < abs(self.a_mean) ** 2 - tol:
            raise InvariantViolation("centered charger occupation negative")
        if self.nb < abs(self.b_mean) ** 2 - tol:
            raise InvariantViolation("centered battery occupation negative")
        if abs(self.ab_dag) ** 2 > self.na * (self.nb + 1.0) + tol:
            raise InvariantViolation("cross moment violates Cauchy-Schwarz")


def _rhs(t: float, y: np.ndarray, g: float, params: ModelParams, profile: DriveProfile) -> np.ndarray:
    gamma = params.gamma
    f = drive_field(t, profile, params.delta_r, params.gamma)
    a, b = y[_A], y[_B]
    na, nb = y[_NA].real, y[_NB].real
    abd, a2, b2, ab = y[_ABD], y[_A2], y[_B2], y[_AB]
    dy = np.empty(8, dtype=complex)
    dy[_A] = -1j * (g * b + f) - 0.5 * gamma * a
    dy[_B] = -1j * g * a
    dy[_NA] = -2.0 * g * abd.imag - 2.0 * (f.conjugate() * a).imag - gamma * na + gamma * params.nbar
    dy[_NB] = 2.0 * g * abd.imag
    dy[_ABD] = 1j * (g * (na - nb) - f * b.conjugate()) - 0.5 * gamma * abd
    dy[_A2] = -2j * (g * ab + f * a) - gamma * a2
    dy[_B2] = -2j * g * ab
    dy[_AB] = -1j * (g * (a2 + b2) + f * b) - 0.5 * gamma * ab
    return dy


def moment_rhs(
    t: float, state: MomentState, params: ModelParams, profile: DriveProfile
) -> MomentState:
    """Time derivative of every moment at time ``t``.

    The exchange coupling is gated by the charging window; the drive field is
    the (possibly counterdiabatically corrected) amplitude for ``profile``.
    """
    g = params.g * coupling_window(t, params.tau)
    return MomentState.from_array(_rhs(t, state.as_array(), g, params, profile))


def integration_legs(t_end: float, tau: float) -> list[tuple[float, float, float]]:
    """Split [0, t_end] at the coupling switch-off into smooth pieces.

    Returns (t_start, t_stop, window) triples. Stepping each leg separately
    keeps the integrator at full order; a stage straddling the window jump
    would otherwise degrade physicality at the invariant-tolerance level.
    """
    if tau >= t_end:
        return [(0.0, t_end, 1.0)]
    return [(0.0, tau, 1.0), (tau, t_end, 0.0)]


def max_step(params: ModelParams, profile: DriveProfile) -> float:
    """Largest integrator step the accuracy precondition allows."""
    omega_env = profile.omega_env if profile.kind in (DriveKind.SIN_SQ, DriveKind.CD_SIN_SQ) else 0.0
    return 0.05 / max(omega_env, params.g, params.gamma, params.omega0)


@dataclass
class Trajectory:
    """Sampled moment history of one run; immutable once produced.

    ``moments`` has one row per retained sample in the order
    (a_mean, b_mean, na, nb, ab_dag, a_sq, b_sq, ab).
    """

    times: np.ndarray
    moments: np.ndarray
    params: ModelParams
    profile: DriveProfile
    step: float

    def __len__(self) -> int:
        return len(self.times)

    def state_at(self, i: int) -> MomentState:
        return MomentState.from_array(self.moments[i])

    def __iter__(self):
        for i, t in enumerate(self.times):
            yield float(t), self.state_at(i)


def integrate(
    params: ModelParams,
    profile: DriveProfile,
    step: float,
    t_end: float,
    sample_stride: int = 1,
    initial: MomentState | None = None,
    check_invariants: bool = True,
) -> Trajectory:
    """Fixed-step fourth-order Runge-Kutta integration of the moment equations.

    Starts from the vacuum (all moments zero) unless ``initial`` is supplied,
    which is meant for validation runs that inject a prepared state. Every
    ``sample_stride``-th step is retained, plus the final one.

    Raises
    ------
    StepTooLarge
        If ``step`` exceeds 0.05/max(omega_env, g, gamma, omega0).
    InvariantViolation
        If a retained sample breaks physicality beyond tolerance, which
        signals integrator misconfiguration rather than physics.
    """
    if step <= 0:
        raise ValueError(f"step must be > 0, got {step}")
    if t_end < 0:
        raise ValueError(f"t_end must be >= 0, got {t_end}")
    if sample_stride < 1:
        raise ValueError(f"sample_stride must be >= 1, got {sample_stride}")
    cap = max_step(params, profile)
    if step > cap * (1.0 + 1e-12):
        raise StepTooLarge(f"step {step} exceeds cap {cap:.6g} for these parameters")

    y = (initial or MomentState.vacuum()).as_array()
    times = [0.0]
    moments = [y]
    global_step = 0
    for t_start, t_stop, window in integration_legs(t_end, params.tau):
        span = t_stop - t_start
        if span <= 0:
            continue
        n_steps = max(1, math.ceil(span / step - 1e-12))
        h = span / n_steps
        g = params.g * window
        for k in range(n_steps):
            t = t_start + k * h
            k1 = _rhs(t, y, g, params, profile)
            k2 = _rhs(t + 0.5 * h, y + 0.5 * h * k1, g, params, profile)
            k3 = _rhs(t + 0.5 * h, y + 0.5 * h * k2, g, params, profile)
            k4 = _rhs(t + h, y + h * k3, g, params, profile)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            global_step += 1
            if global_step % sample_stride == 0:
                # pin the leg endpoint exactly; accumulated k*h rounds off
                times.append(t_stop if k == n_steps - 1 else t_start + (k + 1) * h)
                moments.append(y)
    if times[-1] != t_end:
        times.append(t_end)
        moments.append(y)

    traj = Trajectory(
        times=np.array(times),
        moments=np.array(moments),
        params=params,
        profile=profile,
        step=step,
    )
    if check_invariants:
        for i in range(len(traj)):
            traj.state_at(i).validate()
    return traj
