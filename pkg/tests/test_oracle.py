import math

import numpy as np
import pytest

from qbattery.dynamics import MomentState, integrate
from qbattery.errors import TruncationLeak
from qbattery.model import DriveProfile, ModelParams
from qbattery.oracle import DenseState, dense_evolve, extract_moments, mode_operators


def coherent_vector(alpha, n):
    amps = np.zeros(n, dtype=complex)
    amps[0] = 1.0
    for k in range(1, n):
        amps[k] = amps[k - 1] * alpha / np.sqrt(k)
    return amps * np.exp(-0.5 * abs(alpha) ** 2)


def product_state(vec_a, vec_b):
    psi = np.kron(vec_a, vec_b)
    return np.outer(psi, psi.conj())


class TestDenseEvolve:
    def test_vacuum_stationary(self):
        params = ModelParams(omega0=1.0, g=0.3, gamma=0.0, nbar=0.0, delta_r=0.0, tau=5.0)
        run = dense_evolve(params, DriveProfile.off(), cutoffs=(5, 5), step=0.01, t_end=2.0)
        rho = run.states[-1].rho
        expected = np.zeros_like(rho)
        expected[0, 0] = 1.0
        assert np.max(np.abs(rho - expected)) < 1e-12

    def test_single_mode_thermalization(self):
        # decoupled charger relaxes to nbar(1 - e^{-gamma t}); cutoff high
        # enough that the geometric tail stays under the leak guard
        gamma, nbar, t_end = 1.0, 1.0, 5.0
        params = ModelParams(omega0=1.0, g=0.0, gamma=gamma, nbar=nbar, delta_r=0.0, tau=t_end)
        run = dense_evolve(params, DriveProfile.off(), cutoffs=(24, 4), step=0.005, t_end=t_end, sample_stride=200)
        na = extract_moments(run.states[-1]).na
        expected = nbar * (1.0 - math.exp(-gamma * t_end))
        assert na == pytest.approx(expected, abs=2e-5)  # truncation bias at cutoff 24

    def test_trace_and_validity_every_sample(self):
        # gamma = 0.5 quadruples the CD correction, so <a> swings near 1 and
        # the displaced-thermal tail needs the full cutoff
        params = ModelParams(omega0=1.0, g=0.2, gamma=0.5, nbar=0.2, delta_r=0.0, tau=3.0)
        prof = DriveProfile.cd_sin_sq(0.2, 0.5)
        run = dense_evolve(params, prof, cutoffs=(14, 14), step=0.01, t_end=3.0, sample_stride=50)
        for state in run.states:
            state.validate()
            assert abs(np.trace(state.rho) - 1.0) < 1e-8

    def test_truncation_leak_raises(self):
        # strong drive into a tiny box must trip the guard, not silently reflect
        params = ModelParams(omega0=1.0, g=0.0, gamma=0.1, nbar=0.0, delta_r=0.0, tau=10.0)
        prof = DriveProfile.static(1.5)
        with pytest.raises(TruncationLeak):
            dense_evolve(params, prof, cutoffs=(4, 4), step=0.005, t_end=10.0)

    def test_moments_match_integrator(self):
        params = ModelParams(omega0=1.0, g=0.3, gamma=0.4, nbar=0.1, delta_r=0.5, tau=4.0)
        prof = DriveProfile.cd_sin_sq(0.2, 0.5)
        dense = dense_evolve(params, prof, cutoffs=(10, 10), step=0.01, t_end=4.0, sample_stride=100)
        traj = integrate(params, prof, 0.004, 4.0, sample_stride=250)
        assert np.allclose(dense.times, traj.times)
        worst = 0.0
        for i in range(len(dense.times)):
            m = extract_moments(dense.states[i]).as_array()
            worst = max(worst, float(np.max(np.abs(m - traj.moments[i]))))
        assert worst < 1e-6

    def test_energy_decomposition_at_density_matrix_level(self):
        # reduced battery energy from (F, T) equals (F=0, T) plus (F, T=0)
        base = dict(omega0=1.0, g=0.25, gamma=0.6, delta_r=0.0, tau=3.0)
        prof = DriveProfile.cd_sin_sq(0.2, 0.5)
        runs = {}
        for tag, nbar, p in (
            ("full", 0.2, prof),
            ("thermal", 0.2, DriveProfile.off()),
            ("coherent", 0.0, prof),
        ):
            params = ModelParams(nbar=nbar, **base)
            runs[tag] = dense_evolve(params, p, cutoffs=(12, 12), step=0.01, t_end=3.0, sample_stride=60)
        for i in range(len(runs["full"].times)):
            nb = {t: extract_moments(r.states[i]).nb for t, r in runs.items()}
            assert nb["full"] == pytest.approx(nb["thermal"] + nb["coherent"], abs=1e-6)


class TestExtractMoments:
    def test_vacuum_gives_zero_moments(self):
        rho = np.zeros((16, 16), dtype=complex)
        rho[0, 0] = 1.0
        m = extract_moments(DenseState(rho=rho, n_a=4, n_b=4))
        assert m.as_array() == pytest.approx(np.zeros(8))

    def test_coherent_state_moments(self):
        alpha, n = 0.6 + 0.3j, 18
        rho = product_state(coherent_vector(alpha, n), coherent_vector(0, 4))
        m = extract_moments(DenseState(rho=rho, n_a=n, n_b=4))
        assert m.a_mean == pytest.approx(alpha, abs=1e-10)
        assert m.na == pytest.approx(abs(alpha) ** 2, abs=1e-10)
        assert m.a_sq == pytest.approx(alpha**2, abs=1e-10)
        assert m.b_mean == 0

    def test_thermal_state_moments(self):
        nbar, n = 0.3, 20
        probs = (nbar / (1 + nbar)) ** np.arange(n) / (1 + nbar)
        rho_a = np.diag(probs / probs.sum())
        vac = np.zeros((4, 4))
        vac[0, 0] = 1.0
        rho = np.kron(rho_a, vac).astype(complex)
        m = extract_moments(DenseState(rho=rho, n_a=n, n_b=4))
        assert m.a_mean == 0
        assert m.a_sq == 0
        assert m.na == pytest.approx(nbar, abs=1e-8)

    def test_mode_operators_commutator(self):
        ops = mode_operators(6, 5)
        comm = ops["a"] @ ops["ad"] - ops["ad"] @ ops["a"]
        # identity except the top charger level, where the hard cutoff bites
        diag = np.einsum("ii->i", comm).real.reshape(6, 5)
        assert np.allclose(diag[:-1, :], 1.0)
        assert np.allclose(diag[-1, :], 1.0 - 6.0)

    def test_reduced_battery_trace(self):
        params = ModelParams(omega0=1.0, g=0.3, gamma=0.2, nbar=0.1, delta_r=0.0, tau=2.0)
        run = dense_evolve(params, DriveProfile.static(0.05), cutoffs=(8, 8), step=0.01, t_end=2.0)
        red = run.states[-1].reduced_battery()
        assert red.shape == (8, 8)
        assert np.trace(red).real == pytest.approx(1.0, abs=1e-8)
