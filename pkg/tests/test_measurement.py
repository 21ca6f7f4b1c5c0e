import math

import numpy as np
import pytest

from src.errors import ExceptionalPointError, InvalidArgumentError, PoleError, ValidityWarning
from src.measurement.tunneling import (MeasurementParams, decay_eigensystem, decay_report, decay_trajectories,
                                       err_bare_closed, exact_survival, initial_state, long_time_error,
                                       ratio_closed, splitting_condition, survival_error, weak_coupling_rates)


@pytest.fixture
def phase_qubit():
    """f_m = 7, f_q = 6.5, g_m = 25 MHz, Gamma = 1/ns, t_meas = 40 ns."""
    return MeasurementParams(f_m=7.0, f_q=6.5, g_m=0.025, gamma=1.0, t_meas=40.0)


def _with(mp, **changes):
    values = dict(f_m=mp.f_m, f_q=mp.f_q, g_m=mp.g_m, gamma=mp.gamma, t_meas=mp.t_meas)
    values.update(changes)
    return MeasurementParams(**values)


class TestParams:
    @pytest.mark.parametrize("changes", [
        {'gamma': 0.0},
        {'g_m': -0.01},
        {'t_meas': math.nan},
        {'f_q': -6.5},
        {'t_meas': -1.0},
    ])
    def test_rejects_invalid(self, phase_qubit, changes):
        with pytest.raises(InvalidArgumentError):
            _with(phase_qubit, **changes)

    def test_regime(self, phase_qubit):
        assert phase_qubit.weak_coupling
        assert phase_qubit.saturated
        assert not _with(phase_qubit, t_meas=5.0).saturated


class TestRates:
    def test_weak_coupling_rate(self, phase_qubit):
        gamma_m, gamma_q = weak_coupling_rates(phase_qubit)
        assert gamma_m == pytest.approx(2.43824e-3, rel=1e-4)
        assert gamma_m + gamma_q == pytest.approx(phase_qubit.gamma)

    def test_exact_rates_conserve_trace(self, phase_qubit):
        system = decay_eigensystem(phase_qubit)
        assert system.gamma_m + system.gamma_q == pytest.approx(phase_qubit.gamma, rel=1e-12)
        assert system.gamma_m == pytest.approx(weak_coupling_rates(phase_qubit)[0], rel=0.05)
        assert system.gamma_m < system.gamma_q

    def test_memory_like_state_first(self, phase_qubit):
        system = decay_eigensystem(phase_qubit)
        right = system.right
        assert abs(right[0, 0]) > abs(right[1, 0])
        assert abs(right[1, 1]) > abs(right[0, 1])

    def test_exceptional_point(self):
        mp = MeasurementParams(f_m=7.0, f_q=7.0, g_m=1.0 / (8.0 * math.pi), gamma=1.0, t_meas=40.0)
        assert splitting_condition(mp) == math.inf or splitting_condition(mp) > 1e12
        with pytest.raises(ExceptionalPointError):
            decay_eigensystem(mp)

    def test_splitting_condition_is_tame_off_resonance(self, phase_qubit):
        assert splitting_condition(phase_qubit) < 2.0


class TestInitialStates:
    def test_bare(self, phase_qubit):
        np.testing.assert_array_equal(initial_state(phase_qubit, 'bare'), [0.0, 1.0])

    def test_eigen_is_qubit_like(self, phase_qubit):
        psi = initial_state(phase_qubit, 'eigen')
        assert np.linalg.norm(psi) == pytest.approx(1.0)
        assert psi[1].imag == pytest.approx(0.0, abs=1e-15)
        assert psi[1].real > 0.99
        # admixture of order g_m / Delta_m
        assert abs(psi[0]) == pytest.approx(0.05, rel=0.05)

    def test_unknown(self, phase_qubit):
        with pytest.raises(InvalidArgumentError):
            initial_state(phase_qubit, 'mixed')


class TestSurvival:
    def test_integrator_matches_exponential(self, phase_qubit):
        mp = _with(phase_qubit, t_meas=5.0)
        for initial in ('bare', 'eigen'):
            assert survival_error(mp, initial, 'integrator') == pytest.approx(
                survival_error(mp, initial, 'exact'), abs=1e-8)

    def test_zero_time_keeps_everything(self, phase_qubit):
        mp = _with(phase_qubit, t_meas=0.0)
        assert survival_error(mp) == pytest.approx(1.0)
        times, alpha2, beta2 = decay_trajectories(mp, 'bare')
        assert len(times) == 1 and beta2[0] == 1.0

    def test_unknown_method(self, phase_qubit):
        with pytest.raises(InvalidArgumentError):
            survival_error(phase_qubit, 'bare', 'euler')

    def test_trajectory_decays(self, phase_qubit):
        times, alpha2, beta2 = decay_trajectories(_with(phase_qubit, t_meas=3.0), 'bare', spacing=0.5)
        assert times[0] == 0.0 and times[-1] == pytest.approx(3.0)
        total = alpha2 + beta2
        assert np.all(np.diff(total) <= 1e-12)
        np.testing.assert_allclose(np.abs(exact_survival(_with(phase_qubit, t_meas=3.0), 'bare', times)) ** 2,
                                   np.column_stack([alpha2, beta2]), atol=1e-8)


class TestLongTime:
    def test_closed_form_bare_error(self, phase_qubit):
        assert err_bare_closed(phase_qubit) == pytest.approx(2.212e-3, rel=1e-3)
        assert long_time_error(phase_qubit, 'bare') == pytest.approx(err_bare_closed(phase_qubit), rel=0.05)

    def test_eigenstate_wins_for_slow_tunneling(self, phase_qubit):
        assert long_time_error(phase_qubit, 'eigen', 0.0) < long_time_error(phase_qubit, 'bare', 0.0)

    def test_bare_state_wins_for_fast_tunneling(self, phase_qubit):
        fast = _with(phase_qubit, gamma=10.0)
        assert ratio_closed(fast) > 1
        assert long_time_error(fast, 'eigen', 0.0) > long_time_error(fast, 'bare', 0.0)

    def test_ratio_crossover(self, phase_qubit):
        assert ratio_closed(_with(phase_qubit, gamma=2 * math.pi)) == pytest.approx(1.0)

    def test_ratio_pole(self, phase_qubit):
        with pytest.raises(PoleError):
            ratio_closed(_with(phase_qubit, f_q=7.0))


class TestReport:
    def test_saturated_measurement(self, phase_qubit):
        report = decay_report(phase_qubit, spacing=1.0)
        assert report.ratio == pytest.approx(0.02533, rel=0.05)
        assert report.ratio_closed == pytest.approx(0.02533, rel=1e-3)
        assert report.err_bare == pytest.approx(report.err_bare_closed, rel=0.05)
        assert report.gamma_m == pytest.approx(report.gamma_m_weak, rel=0.05)
        assert report.times[-1] == pytest.approx(40.0)
        assert len(report.rows()[0]) == len(report.header())
        assert set(report.summary()) >= {'err_bare', 'err_eigen', 'ratio', 'ratio_closed'}

    def test_strong_coupling_warns(self, phase_qubit):
        with pytest.warns(ValidityWarning):
            report = decay_report(_with(phase_qubit, g_m=0.2, t_meas=1.0), spacing=0.5)
        assert not report.weak_coupling
