import math

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from src.budget.estimators import (ArchitectureParams, conventional_crowding_error, error_budget,
                                   idle_conventional, idle_rezqu_worstcase, idling_error,
                                   idling_overlap_error, landau_zener_error, memory_memory_errors,
                                   omega_zz_conventional)
from src.budget.tails import tail_error_front_ramp, tail_error_kth_qubit
from src.dynamics.pulses import erf_ramp
from src.errors import InvalidArgumentError, PoleError, ValidityWarning
from src.units import to_angular, to_ghz

G = to_angular(0.025)
DELTA = to_angular(0.5)
ETA = to_angular(0.2)


class TestIdling:
    def test_quadratic_form(self):
        assert idling_error(1e-3, 10.0) == pytest.approx(1e-4)
        assert idling_error(1e-3, 10.0, amplitude11=1 / math.sqrt(2)) == pytest.approx(0.25e-4)

    def test_large_angle_warns(self):
        with pytest.warns(ValidityWarning):
            idling_error(0.1, 10.0)

    def test_overlap_oracle_agrees_for_small_angles(self):
        angle = 1e-3
        assert idling_overlap_error(angle, 1.0) == pytest.approx(idling_error(angle, 1.0, 1 / math.sqrt(2)),
                                                                  rel=1e-5)

    def test_rezqu_worst_case(self, architecture, eta):
        assert idle_rezqu_worstcase(architecture, eta) == pytest.approx(2.5e-9, rel=1e-9)

    def test_rezqu_worst_case_closed_form(self, architecture, eta):
        value = idle_rezqu_worstcase(architecture, eta)
        assert value == pytest.approx(0.025 ** 6 * 0.2 ** 2 / 0.5 ** 8, rel=1e-9)
        assert 1e-9 < value < 1e-8

    def test_conventional(self, architecture, eta):
        assert idle_conventional(architecture, eta) == pytest.approx(4e-4, rel=1e-9)
        ratio = idle_rezqu_worstcase(architecture, eta) / idle_conventional(architecture, eta)
        assert ratio == pytest.approx(6.25e-6, rel=1e-9)
        assert ratio <= 1e-4

    def test_conventional_zz(self):
        assert to_ghz(omega_zz_conventional(G, DELTA, ETA)) == pytest.approx(-1.667e-3, rel=1e-3)

    def test_conventional_zz_pole(self):
        with pytest.raises(PoleError):
            omega_zz_conventional(G, ETA, ETA)

    def test_zero_coupling_has_no_ratio(self, eta):
        arch = ArchitectureParams(1, 1, DELTA, DELTA, 0.0, G)
        with pytest.raises(InvalidArgumentError):
            idle_rezqu_worstcase(arch, eta)


class TestMemoryMemory:
    def test_xx_error(self, architecture, eta):
        errors = memory_memory_errors(architecture, eta)
        assert errors.err_xx == pytest.approx(3.90625e-11, rel=1e-9)
        assert errors.err_zz < errors.err_xx

    def test_decoupled_section(self, eta):
        arch = ArchitectureParams(1, 1, DELTA, DELTA, G, G, g_mk=0.0)
        assert memory_memory_errors(arch, eta).err_xx == 0.0

    def test_crowding_counterpart(self, architecture):
        assert conventional_crowding_error(architecture) == pytest.approx(0.05 ** 4)


class TestLandauZener:
    def test_qubit_qubit_crossing(self):
        error = landau_zener_error(G, G, DELTA, to_angular(0.5))
        assert error == pytest.approx(1.234e-4, rel=1e-3)

    def test_qubit_memory_crossing_is_smaller(self):
        plain = landau_zener_error(G, G, DELTA, to_angular(0.5))
        through_memory = landau_zener_error(G, G, DELTA, to_angular(0.5), g_mk=G, delta_mk=DELTA)
        assert through_memory == pytest.approx(plain * 0.05 ** 2)

    def test_zero_sweep_rejected(self):
        with pytest.raises(InvalidArgumentError):
            landau_zener_error(G, G, DELTA, 0.0)


class TestArchitecture:
    def test_defaults_follow_section(self, architecture):
        assert architecture.memory_bus == pytest.approx(2 * DELTA)
        assert architecture.memory_spacing == pytest.approx(DELTA)
        assert architecture.g_bk == architecture.g_b

    @pytest.mark.parametrize("changes", [{'n_qubits': 0}, {'delta_m': 0.0}])
    def test_rejects_invalid(self, changes):
        values = dict(n_qubits=1, n_ops=1, delta_m=DELTA, delta_b=DELTA, g_m=G, g_b=G)
        values.update(changes)
        with pytest.raises(InvalidArgumentError):
            ArchitectureParams(**values)

    def test_budget_terms(self, architecture, eta):
        budget = error_budget(architecture, eta, to_angular(0.5), tail_move=1e-5)
        values = budget.as_dict()
        assert set(values) == {'idle_rezqu', 'idle_conventional', 'xx_memory_memory', 'zz_memory_memory',
                               'tail_move', 'lz_qubit_qubit', 'lz_qubit_memory'}
        assert budget.terms['tail_move'].formula == 'front-ramp-tail'
        assert budget.value('lz_qubit_qubit') == pytest.approx(1.234e-4, rel=1e-3)

    def test_negative_term_rejected(self, architecture, eta):
        with pytest.raises(InvalidArgumentError):
            error_budget(architecture, eta, to_angular(0.5), tail_move=-1.0)


class TestHomogeneity:
    @given(scale=st.floats(min_value=0.2, max_value=5.0), n_qubits=st.integers(1, 16),
           n_ops=st.integers(1, 100))
    @settings(max_examples=40, deadline=None)
    def test_coupling_powers(self, scale, n_qubits, n_ops):
        base = ArchitectureParams.symmetric(n_qubits, n_ops, G, DELTA)
        scaled = ArchitectureParams.symmetric(n_qubits, n_ops, G * scale, DELTA)
        assert idle_rezqu_worstcase(scaled, ETA) == pytest.approx(scale ** 6 * idle_rezqu_worstcase(base, ETA))
        assert memory_memory_errors(scaled, ETA).err_xx == pytest.approx(
            scale ** 8 * memory_memory_errors(base, ETA).err_xx)
        sweep = to_angular(0.5)
        assert landau_zener_error(G * scale, G * scale, DELTA, sweep) == pytest.approx(
            scale ** 4 * landau_zener_error(G, G, DELTA, sweep))

    @given(n_qubits=st.integers(1, 16), n_ops=st.integers(1, 100))
    @settings(max_examples=30, deadline=None)
    def test_counting_powers(self, n_qubits, n_ops):
        single = ArchitectureParams.symmetric(1, 1, G, DELTA)
        many = ArchitectureParams.symmetric(n_qubits, n_ops, G, DELTA)
        assert idle_rezqu_worstcase(many, ETA) == pytest.approx(
            n_qubits ** 2 * n_ops ** 2 * idle_rezqu_worstcase(single, ETA))


class TestTails:
    def test_wide_ramp_below_target_strong_bus(self):
        assert tail_error_front_ramp(erf_ramp(6.5, 7.0, 0.6), 0.05, 6.0) < 1e-4

    def test_wide_ramp_below_target_weak_bus(self):
        assert tail_error_front_ramp(erf_ramp(6.5, 7.0, 0.45), 0.025, 6.0) < 1e-4

    def test_tail_shrinks_with_width(self):
        narrow = tail_error_front_ramp(erf_ramp(6.5, 7.0, 0.35), 0.05, 6.0)
        wide = tail_error_front_ramp(erf_ramp(6.5, 7.0, 1.0), 0.05, 6.0)
        assert wide < narrow

    def test_tail_quadratic_in_coupling(self):
        pulse = erf_ramp(6.5, 7.0, 0.5)
        weak = tail_error_front_ramp(pulse, 0.025, 6.0)
        strong = tail_error_front_ramp(pulse, 0.05, 6.0)
        assert strong == pytest.approx(4 * weak, rel=1e-6)

    def test_rear_window(self):
        pulse = erf_ramp(6.5, 7.0, 0.5)
        assert math.isfinite(tail_error_front_ramp(pulse, 0.05, 6.0, window='rear'))
        with pytest.raises(InvalidArgumentError):
            tail_error_front_ramp(pulse, 0.05, 6.0, window='middle')

    def test_kth_qubit_tail(self):
        pulse = erf_ramp(6.5, 6.1, 1.0)
        value = tail_error_kth_qubit(pulse, 0.025, 0.025, 6.75, 6.0)
        assert 0.0 <= value < 1e-4

    def test_kth_qubit_resonant_with_bus(self):
        with pytest.raises(InvalidArgumentError):
            tail_error_kth_qubit(erf_ramp(6.5, 6.8, 1.0), 0.025, 0.025, 6.0, 6.0)
