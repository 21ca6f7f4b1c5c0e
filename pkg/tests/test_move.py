import math
from dataclasses import replace

import numpy as np
import pytest

import config

from src.dynamics.integrator import StateVector, propagate, propagator_over
from src.dynamics.pulses import ErfRampPulse, constant_pulse
from src.errors import (DegenerateDetuningError, InvalidArgumentError, ValidityWarning)
from src.hamiltonian.basis import BUS, MEMORY, QUBIT, block_labels
from src.move.design import (MoveDesign, analytic_design, design_flat_part, design_front_ramp, front_ramp_roots,
                             eigenbasis_populations, flat_condition, front_ramp_residual, move_error,
                             minimum_clearance, move_with_occupied_bus, rabi_frequency, validity_flags)
from src.move.families import (Direction, ErfFamily, MoveMode, PiecewiseLinearFamily, flat_frequency,
                               make_family, oriented_family)
from src.move.optimizer import MoveObjective, optimize_move, start_points
from src.spectra.system import eigensystem_at
from src.units import to_angular


class TestFamilies:
    def test_default_piecewise_linear_front(self, device, pl_family):
        assert pl_family.default_front(device) == (0.5, pytest.approx(6.85))

    def test_piecewise_linear_knots(self, device, pl_family):
        pulse = pl_family.build(device, (0.5, 6.85), 0.0, 10.0)
        assert pulse.t1 == pytest.approx(0.6)
        assert pulse.t2 == pytest.approx(10.6)
        assert pulse.t_end == pytest.approx(11.6)
        assert pulse.frequency_ghz(5.0) == pytest.approx(7.0)
        assert pulse.frequency_ghz(pulse.t_end) == pytest.approx(6.5)

    @pytest.mark.parametrize("front, duration", [
        ((0.0, 6.85), 1.0),
        ((1.5, 6.85), 1.0),
        ((-0.5, 6.85), 1.0),
        ((0.5, 6.85), -1.0),
    ])
    def test_piecewise_linear_rejects(self, device, pl_family, front, duration):
        with pytest.raises(InvalidArgumentError):
            pl_family.build(device, front, 0.0, duration)

    def test_flat_frequency_follows_overshoot(self, device):
        assert flat_frequency(device, to_angular(0.002)) == pytest.approx(7.002)

    def test_erf_build(self, device):
        pulse = ErfFamily(6.7, 6.5).build(device, (0.5, 0.3), to_angular(0.001), 9.0)
        assert isinstance(pulse, ErfRampPulse)
        assert pulse.f_flat == pytest.approx(7.001)
        assert pulse.t2 - pulse.t1 == pytest.approx(9.0)

    def test_orientation(self):
        family = oriented_family('erf', Direction.MEMORY_TO_QUBIT, 6.7, 6.5)
        assert (family.f_start, family.f_end) == (6.5, 6.7)
        family = oriented_family('piecewise-linear', Direction.QUBIT_TO_MEMORY, 6.7, 6.5)
        assert (family.f_start, family.f_end) == (6.7, 6.5)

    def test_unknown_family(self):
        with pytest.raises(InvalidArgumentError):
            make_family('gaussian', 6.7, 6.5)


class TestMoveError:
    def test_far_detuned_pulse_does_not_transfer(self, device):
        report = move_error(device, constant_pulse(6.5, 20.0))
        assert report.err > 0.99

    def test_zero_flat_part_fails(self, device, pl_family):
        pulse = pl_family.build(device, pl_family.default_front(device), 0.0, 0.0)
        assert move_error(device, pulse).err > 0.5

    def test_plain_pulse_transfers_most(self, device, pl_family, plain_move):
        report = move_error(device, plain_move.pulse(device))
        unshaped = move_error(device, pl_family.build(device, pl_family.default_front(device), 0.0, 0.0))
        assert report.err < unshaped.err
        total = abs(report.target) ** 2 + abs(report.stay) ** 2 + abs(report.bus) ** 2
        assert total == pytest.approx(1.0, abs=1e-8)
        assert report.tail_gamma == pytest.approx(abs(report.bus) ** 2)

    def test_time_reversed_pulse_has_equal_error(self, device, plain_move):
        pulse = plain_move.pulse(device)
        forward = move_error(device, pulse, Direction.QUBIT_TO_MEMORY)
        backward = move_error(device, pulse.reversed(), Direction.MEMORY_TO_QUBIT)
        assert backward.err == pytest.approx(forward.err, abs=1e-7)

    def test_memory_to_qubit_design_pulse_is_reversed(self, device, plain_move):
        design = replace(plain_move, direction=Direction.MEMORY_TO_QUBIT)
        pulse = design.pulse(device)
        assert pulse.frequency_ghz(0.0) == pytest.approx(6.5)
        assert pulse.frequency_ghz(pulse.t_end) == pytest.approx(6.7)

    def test_occupied_bus_decouples_without_bus_coupling(self, decoupled_bus, plain_move):
        single = move_error(decoupled_bus, plain_move.pulse(decoupled_bus)).err
        assert move_with_occupied_bus(decoupled_bus, plain_move) == pytest.approx(single, abs=1e-8)

    def test_eigenbasis_populations_sum_to_one(self, device, plain_move):
        pulse = plain_move.pulse(device)
        start = eigensystem_at(device, float(pulse.omega(0.0)), 1)
        psi0 = StateVector(start.vector(QUBIT), tuple(block_labels(1)))
        trajectory = propagate(device, pulse, psi0).sampled(0.5)
        populations = eigenbasis_populations(device, pulse, trajectory)
        assert populations.shape == (len(trajectory.times), 3)
        np.testing.assert_allclose(populations.sum(axis=1), 1.0, atol=1e-8)
        # dressed qubit is the middle level at the start
        assert populations[0, 1] == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("phase", [0.0, 0.7, math.pi / 2, 2.5, -math.pi])
    def test_error_ignores_eigenvector_phase(self, device, plain_move, phase):
        pulse = plain_move.pulse(device)
        required = (QUBIT, MEMORY, BUS)
        start = eigensystem_at(device, float(pulse.omega(0.0)), 1, required)
        end = eigensystem_at(device, float(pulse.omega(pulse.t_end)), 1, required)
        evolved = propagator_over(device, pulse, 1).apply(np.exp(-0.3j * phase) * start.vector(QUBIT))
        rephased = 1.0 - abs(np.vdot(np.exp(1j * phase) * end.vector(MEMORY), evolved)) ** 2
        assert abs(rephased - move_error(device, pulse).err) < 1e-14


class TestFrontRamp:
    def test_decoupled_bus_leaves_front_free(self, decoupled_bus, pl_family):
        design = design_front_ramp(decoupled_bus, pl_family)
        assert design.unconstrained
        assert design.front == pl_family.default_front(decoupled_bus)

    def test_start_on_bus_resonance(self, device):
        with pytest.raises(DegenerateDetuningError):
            front_ramp_residual(device, constant_pulse(6.0, 5.0))

    def test_designed_front_has_no_residual(self, device, pl_family):
        design = design_front_ramp(device, pl_family)
        assert design.converged
        assert not design.unconstrained
        rabi = rabi_frequency(device.g_m_angular, 0.0)
        pulse = pl_family.build(device, design.front, 0.0, math.pi / rabi)
        assert abs(front_ramp_residual(device, pulse)) < 1e-8
        assert design.clearance >= minimum_clearance(device)

    def test_roots_keep_clear_of_memory(self, device, pl_family):
        roots = front_ramp_roots(device, pl_family)
        assert roots
        for root in roots:
            assert root.converged
            assert root.residual < config.ROOT_TOLERANCE
            assert root.clearance >= minimum_clearance(device)
            assert root.front[1] <= device.f_m - minimum_clearance(device)
        clearances = [root.clearance for root in roots]
        assert clearances == sorted(clearances, reverse=True)

    def test_root_next_to_memory_is_rejected(self, device, pl_family):
        design = design_front_ramp(device, pl_family, initial=(0.116, 6.946))
        assert design.converged
        assert design.clearance >= minimum_clearance(device)
        assert design.front[1] < 6.93


class TestFlatPart:
    def test_needs_memory_coupling(self, device, pl_family):
        with pytest.raises(InvalidArgumentError):
            design_flat_part(device.replace(g_m=0.0), pl_family, (0.5, 6.85))

    def test_memory_resonant_endpoint(self, device):
        with pytest.raises(DegenerateDetuningError):
            flat_condition(device, constant_pulse(7.0, 5.0))

    def test_duration_relation(self, device, pl_family):
        flat = design_flat_part(device, pl_family, pl_family.default_front(device))
        rabi = rabi_frequency(device.g_m_angular, flat.overshoot)
        assert abs(flat.flat_duration - (math.pi / rabi - flat.tau)) < 1e-12
        assert flat.varphi == pytest.approx(math.pi * flat.overshoot / (4 * device.g_m_angular))
        assert flat.pulse.t2 - flat.pulse.t1 == pytest.approx(flat.flat_duration)

    def test_validity_flags(self, device):
        with pytest.warns(ValidityWarning):
            flags = validity_flags(device, 0.6 * device.g_m_angular, 0.0)
        assert flags == ("large-overshoot",)


class TestDesignRecord:
    def test_round_trip(self, plain_move):
        design = replace(plain_move, achieved_error=4.2e-4, flags=("large-overshoot",), stagnated=True)
        assert MoveDesign.from_record(design.to_record()) == design

    def test_unknown_key(self, plain_move):
        text = replace(plain_move, achieved_error=0.0).to_record() + "colour = blue\n"
        with pytest.raises(InvalidArgumentError):
            MoveDesign.from_record(text)

    def test_missing_key(self):
        with pytest.raises(InvalidArgumentError):
            MoveDesign.from_record("# move design\nfamily = erf\n")


class TestOptimizerSetup:
    def test_start_points_are_seeded(self):
        origin, scale = np.array([0.01, 10.0]), np.array([0.01, 0.1])
        first = start_points(2, origin, scale, 4, 0.05, seed=3)
        second = start_points(2, origin, scale, 4, 0.05, seed=3)
        assert len(first) == 4
        np.testing.assert_array_equal(first[0], np.zeros(2))
        for a, b in zip(first, second):
            np.testing.assert_array_equal(a, b)
        assert np.all(np.abs(first[1] * scale) <= 0.05 * np.maximum(np.abs(origin), scale) + 1e-15)

    def test_two_param_keeps_front(self, device, pl_family, plain_move):
        objective = MoveObjective(device, pl_family, Direction.QUBIT_TO_MEMORY, MoveMode.TWO_PARAM, plain_move)
        assert objective.dimension == 2
        front, overshoot, duration = objective.unpack([1.0, 0.0])
        assert front == plain_move.front
        assert overshoot == pytest.approx(0.1 * device.g_m_angular)
        assert duration == pytest.approx(plain_move.flat_duration)

    def test_invalid_point_scores_as_failure(self, device, pl_family, plain_move):
        objective = MoveObjective(device, pl_family, Direction.QUBIT_TO_MEMORY, MoveMode.TWO_PARAM, plain_move)
        assert objective([0.0, -1e3]) == 1.0
        np.testing.assert_array_equal(objective.residuals([0.0, -1e3]), np.ones(4))

    def test_rejects_analytic_mode(self, device, pl_family):
        with pytest.raises(InvalidArgumentError):
            optimize_move(device, pl_family, MoveMode.ANALYTIC)

    def test_rejects_zero_starts(self, device, pl_family):
        with pytest.raises(InvalidArgumentError):
            optimize_move(device, pl_family, MoveMode.TWO_PARAM, options={'n_starts': 0})


@pytest.mark.slow
class TestAnalyticDesign:
    @pytest.fixture(scope="class")
    def design(self):
        from src.hamiltonian.system import DeviceParams
        params = DeviceParams(f_m=7.0, f_b=6.0, eta=0.2, g_m=0.025, g_b=0.025)
        return params, analytic_design(params, PiecewiseLinearFamily(6.7, 6.5))

    def test_error_below_target(self, design):
        _, result = design
        assert 2e-4 <= result.achieved_error <= 1e-3
        assert params.f_m - result.front[1] >= config.FRONT_CLEARANCE_COUPLINGS * params.g_m
        assert result.mode is MoveMode.ANALYTIC
        assert not result.unconstrained_front

    def test_duration_self_check(self, design):
        params, result = design
        rabi = rabi_frequency(params.g_m_angular, result.overshoot)
        assert abs(result.flat_duration - (math.pi / rabi - result.tau)) < 1e-9

    def test_pulse_endpoints(self, design):
        params, result = design
        pulse = result.pulse(params)
        assert pulse.frequency_ghz(0.0) == pytest.approx(6.7)
        assert pulse.frequency_ghz(pulse.t_end) == pytest.approx(6.5)
        assert move_error(params, pulse).err == pytest.approx(result.achieved_error, abs=1e-12)

    def test_four_parameter_refinement(self, design):
        params, result = design
        optimized = optimize_move(params, PiecewiseLinearFamily(6.7, 6.5), MoveMode.FOUR_PARAM,
                                  start=result, options={'n_starts': 2})
        assert optimized.achieved_error < 1e-10
        assert not optimized.stagnated
        assert 2e-5 <= move_with_occupied_bus(params, optimized) <= 5e-4
