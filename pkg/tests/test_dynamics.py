import math

import numpy as np
import pytest

from qbattery.dynamics import MomentState, integrate, max_step, moment_rhs
from qbattery.errors import InvariantViolation, StepTooLarge
from qbattery.model import DriveProfile, ModelParams


def params(g=0.0, gamma=0.0, nbar=0.0, delta_r=0.0, tau=100.0):
    return ModelParams(omega0=1.0, g=g, gamma=gamma, nbar=nbar, delta_r=delta_r, tau=tau)


def coherent_pair(alpha, beta):
    """Moment state of a product of coherent states |alpha> x |beta>."""
    return MomentState(
        a_mean=alpha,
        b_mean=beta,
        na=abs(alpha) ** 2,
        nb=abs(beta) ** 2,
        ab_dag=alpha * np.conj(beta),
        a_sq=alpha**2,
        b_sq=beta**2,
        ab=alpha * beta,
    )


class TestMomentRhs:
    def test_vacuum_stationary_without_drive(self):
        d = moment_rhs(0.5, MomentState.vacuum(), params(g=0.3, gamma=0.7), DriveProfile.off())
        assert d.as_array() == pytest.approx(np.zeros(8))

    def test_thermal_relaxation_term(self):
        # uncoupled, undriven: d<n_a>/dt = -gamma*n0 + gamma*nbar
        s = MomentState(na=2.0)
        d = moment_rhs(0.0, s, params(gamma=0.8, nbar=0.3), DriveProfile.off())
        assert d.na == pytest.approx(-0.8 * 2.0 + 0.8 * 0.3, abs=1e-14)

    def test_beamsplitter_feeds_battery(self):
        # undamped: d<b>/dt = -i g <a>, d<a>/dt = 0 when <b> = 0 and F = 0
        s = MomentState(a_mean=1.0 + 0j, na=1.0, a_sq=1.0 + 0j)
        d = moment_rhs(0.0, s, params(g=0.4), DriveProfile.off())
        assert d.a_mean == pytest.approx(0.0, abs=1e-14)
        assert d.b_mean == pytest.approx(-0.4j, abs=1e-14)


class TestIntegrate:
    def test_undriven_zero_temperature_stays_vacuum(self):
        traj = integrate(params(g=0.3, gamma=0.5), DriveProfile.off(), 0.01, 5.0)
        assert np.max(np.abs(traj.moments)) == 0.0

    def test_thermalization_closed_form(self):
        gamma, nbar = 1.0, 1.0
        traj = integrate(params(gamma=gamma, nbar=nbar), DriveProfile.off(), 0.005, 8.0, 100)
        expected = nbar * (1.0 - np.exp(-gamma * traj.times))
        na = traj.moments[:, 2].real
        assert na == pytest.approx(expected, abs=1e-10)

    def test_beamsplitter_full_swap(self):
        # injected coherent charger swaps into the battery at g*t = pi/2
        g = 0.25
        t_swap = 0.5 * math.pi / g
        traj = integrate(
            params(g=g),
            DriveProfile.off(),
            0.001,
            t_swap,
            sample_stride=10**9,  # keep first and last only
            initial=coherent_pair(1.0 + 0j, 0j),
        )
        final = traj.state_at(len(traj) - 1)
        assert abs(final.a_mean) == pytest.approx(0.0, abs=1e-9)
        assert abs(final.b_mean) == pytest.approx(1.0, abs=1e-9)
        assert final.b_mean == pytest.approx(-1j, abs=1e-9)

    def test_first_sample_is_vacuum_and_times_increase(self):
        traj = integrate(params(g=0.2, gamma=0.3, nbar=0.4), DriveProfile.off(), 0.01, 2.0, 7)
        assert np.max(np.abs(traj.moments[0])) == 0.0
        assert np.all(np.diff(traj.times) > 0)
        assert traj.times[-1] == pytest.approx(2.0)

    def test_step_cap_enforced(self):
        prof = DriveProfile.sin_sq(0.1, 4.0)
        assert max_step(params(), prof) == pytest.approx(0.05 / 4.0)
        with pytest.raises(StepTooLarge):
            integrate(params(), prof, 0.02, 1.0)

    def test_number_conservation_closed_limit(self):
        traj = integrate(
            params(g=0.5),
            DriveProfile.off(),
            0.005,
            10.0,
            sample_stride=20,
            initial=coherent_pair(0.8 + 0.1j, 0.2 - 0.3j),
        )
        total = traj.moments[:, 2].real + traj.moments[:, 3].real
        assert np.max(np.abs(total - total[0])) < 1e-8 * traj.times[-1]

    def test_damping_contraction_of_first_moment(self):
        gamma = 0.9
        traj = integrate(
            params(gamma=gamma),
            DriveProfile.off(),
            0.005,
            6.0,
            sample_stride=40,
            initial=coherent_pair(1.0 + 0j, 0j),
        )
        expected = np.exp(-0.5 * gamma * traj.times)
        assert traj.moments[:, 0] == pytest.approx(expected, abs=1e-9)

    def test_gaussian_purity_under_coherent_drive(self):
        # at T = 0 the joint state stays an exact product of coherent states
        p = params(g=0.2, gamma=1.0, tau=100.0)
        prof = DriveProfile.cd_sin_sq(0.3, 0.5)
        traj = integrate(p, prof, 0.005, 12.0, sample_stride=20)
        a, b = traj.moments[:, 0], traj.moments[:, 1]
        na, nb = traj.moments[:, 2].real, traj.moments[:, 3].real
        assert np.max(np.abs(traj.moments[:, 5] - a**2)) < 1e-6
        assert np.max(np.abs(traj.moments[:, 6] - b**2)) < 1e-6
        assert np.max(np.abs(na - np.abs(a) ** 2)) < 1e-6
        assert np.max(np.abs(nb - np.abs(b) ** 2)) < 1e-6
        assert np.max(np.abs(traj.moments[:, 4] - a * np.conj(b))) < 1e-6
        assert np.max(np.abs(traj.moments[:, 7] - a * b)) < 1e-6

    def test_fourth_order_convergence(self):
        p = params(g=0.2, gamma=0.3, nbar=0.2, tau=100.0)
        prof = DriveProfile.cd_sin_sq(0.3, 0.5)
        ref = integrate(p, prof, 0.04 / 32.0, 4.0, 10**9).moments[-1]
        errs = []
        steps = [0.04, 0.02, 0.01]
        for h in steps:
            fin = integrate(p, prof, h, 4.0, 10**9).moments[-1]
            errs.append(np.max(np.abs(fin - ref)))
        slope = np.polyfit(np.log(steps), np.log(errs), 1)[0]
        assert slope == pytest.approx(4.0, abs=0.5)

    def test_halving_step_shrinks_error_16x(self):
        p = params(g=0.2, gamma=0.3, nbar=0.2, tau=100.0)
        prof = DriveProfile.cd_sin_sq(0.3, 0.5)
        ref = integrate(p, prof, 0.04 / 32.0, 4.0, 10**9).moments[-1]
        e1 = np.max(np.abs(integrate(p, prof, 0.04, 4.0, 10**9).moments[-1] - ref))
        e2 = np.max(np.abs(integrate(p, prof, 0.02, 4.0, 10**9).moments[-1] - ref))
        assert e1 / e2 == pytest.approx(16.0, rel=0.5)

    def test_invariant_check_rejects_corrupt_initial(self):
        bad = MomentState(a_mean=1.0 + 0j, na=0.1)  # occupation below |<a>|^2
        with pytest.raises(InvariantViolation):
            integrate(params(), DriveProfile.off(), 0.01, 0.5, initial=bad)

    def test_coupling_window_freezes_battery(self):
        p = params(g=0.4, gamma=0.5, tau=3.0)
        prof = DriveProfile.static(0.2)
        traj = integrate(p, prof, 0.002, 6.0, sample_stride=250)
        nb = traj.moments[:, 3].real
        idx_after = traj.times >= 3.0
        assert np.max(np.abs(nb[idx_after] - nb[idx_after][0])) < 1e-12


class TestMomentStateValidate:
    def test_accepts_physical(self):
        coherent_pair(0.5 + 0.5j, 0.2j).validate()

    def test_rejects_negative_occupation(self):
        with pytest.raises(InvariantViolation):
            MomentState(na=-1e-3).validate()

    def test_rejects_cauchy_schwarz_violation(self):
        with pytest.raises(InvariantViolation):
            MomentState(na=0.1, nb=0.1, ab_dag=1.0 + 0j).validate()
