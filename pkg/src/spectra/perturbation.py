"""Perturbative and exact ZZ coupling of the memory-qubit-bus system."""

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Tuple

import config
from ..errors import DegenerateDetuningError, LabelingError, NearDegeneracyWarning, PoleError
from ..hamiltonian.basis import BUS, GROUND, MEMORY, MEMORY_BUS, BasisLabel
from ..hamiltonian.system import DeviceParams, assemble_hamiltonian
from .system import diagonalize_block

ZZ_LABELS = (GROUND, MEMORY, BUS, MEMORY_BUS)

logger = logging.getLogger("rezqu.spectra")


@dataclass(frozen=True)
class Detunings:
    """Detunings at a fixed qubit frequency (rad/ns)."""
    delta_m: float  # omega_m - omega_q
    delta_b: float  # omega_q - omega_b
    memory_bus: float  # omega_m - omega_b
    midpoint_offset: float  # omega_m + omega_b - 2 omega_q
    near_degenerate: bool = False


@dataclass(frozen=True)
class SecondOrderAmplitudes:
    """Second-order admixtures of |200>, |020>, |002> into the dressed |101>."""
    alpha_200: float
    alpha_020: float
    alpha_002: float


@dataclass(frozen=True)
class ZZReport:
    """ZZ coupling at one qubit frequency, exact and perturbative (rad/ns)."""
    omega_q: float
    omega_zz_exact: float
    omega_zz_4th: float
    omega_zz_eta_pert: float
    omega_zz_repulsion: float
    amplitudes_2nd: SecondOrderAmplitudes
    energies: Dict[BasisLabel, float]
    near_degenerate: bool = False

    @property
    def second_fraction(self) -> float:
        """(S)/(S + eta) factor of the fourth-order formula."""
        if self.omega_zz_4th == 0.0:
            return 0.0
        return self.omega_zz_eta_pert / self.omega_zz_4th


def detunings(params: DeviceParams, omega_q: float, warn: bool = True) -> Detunings:
    """Detunings with a near-degeneracy flag; zero detunings raise."""
    delta_m = params.omega_m - omega_q
    delta_b = omega_q - params.omega_b
    memory_bus = params.omega_m - params.omega_b
    if delta_m == 0.0 or delta_b == 0.0 or memory_bus == 0.0:
        raise DegenerateDetuningError(
            f"zero detuning at omega_q={omega_q:.6g} rad/ns (delta_m={delta_m:.3g}, delta_b={delta_b:.3g})"
        )

    offset = params.omega_m + params.omega_b - 2.0 * omega_q
    if abs(offset) <= config.MIDPOINT_SNAP * params.omega_m:
        offset = 0.0

    g_max = max(params.g_m_angular, params.g_b_angular)
    limit = config.NEAR_DEGENERACY_FACTOR * g_max
    near = g_max > 0 and min(abs(delta_m), abs(delta_b), abs(memory_bus)) <= limit
    if near and warn:
        message = f"detunings within {config.NEAR_DEGENERACY_FACTOR:g} couplings at omega_q={omega_q:.6g} rad/ns"
        warnings.warn(message, NearDegeneracyWarning, stacklevel=3)
    return Detunings(delta_m, delta_b, memory_bus, offset, near)


def single_excitation_energies_4th(params: DeviceParams, omega_q: float) -> Tuple[float, float]:
    """Fourth-order dressed energies of |100> and |001>, direct coupling neglected."""
    d = detunings(params, omega_q)
    gm2 = params.g_m_angular ** 2
    gb2 = params.g_b_angular ** 2
    epsilon_100 = (params.omega_m + gm2 / d.delta_m - gm2 ** 2 / d.delta_m ** 3
                   + gm2 * gb2 / (d.delta_m ** 2 * d.memory_bus))
    epsilon_001 = (params.omega_b - gb2 / d.delta_b + gb2 ** 2 / d.delta_b ** 3
                   - gm2 * gb2 / (d.delta_b ** 2 * d.memory_bus))
    return epsilon_100, epsilon_001


def second_order_amplitudes(params: DeviceParams, omega_q: float) -> SecondOrderAmplitudes:
    d = detunings(params, omega_q, warn=False)
    eta = params.eta_angular
    if d.midpoint_offset + eta == 0.0:
        raise PoleError("|101> is resonant with |020>; second-order amplitude diverges")
    coupling = math.sqrt(2.0) * params.g_m_angular * params.g_b_angular
    return SecondOrderAmplitudes(
        alpha_200=coupling / (d.delta_b * d.memory_bus),
        alpha_020=-coupling / (d.delta_m * d.delta_b) * d.midpoint_offset / (d.midpoint_offset + eta),
        alpha_002=coupling / (d.delta_m * d.memory_bus),
    )


def omega_zz_fourth_order(params: DeviceParams, omega_q: float) -> float:
    d = detunings(params, omega_q, warn=False)
    eta = params.eta_angular
    if d.midpoint_offset == 0.0:
        return 0.0
    if d.midpoint_offset + eta == 0.0:
        raise PoleError("|101> is resonant with |020>; fourth-order ZZ diverges")
    gm2 = params.g_m_angular ** 2
    gb2 = params.g_b_angular ** 2
    return (-2.0 * gm2 * gb2 * eta / (d.delta_m ** 2 * d.delta_b ** 2)
            * d.midpoint_offset / (d.midpoint_offset + eta))


def omega_zz_eta_perturbative(params: DeviceParams, omega_q: float) -> float:
    """First order in eta: -eta |alpha_020|^2."""
    return -params.eta_angular * second_order_amplitudes(params, omega_q).alpha_020 ** 2


def omega_zz_level_repulsion(params: DeviceParams, omega_q: float) -> float:
    """Shift of |101> by repulsion from |020>, minus its linear-system value."""
    d = detunings(params, omega_q, warn=False)
    eta = params.eta_angular
    if d.midpoint_offset == 0.0:
        return 0.0
    if d.midpoint_offset + eta == 0.0:
        raise PoleError("|101> is resonant with |020>")
    g_eff = math.sqrt(2.0) * params.g_m_angular * params.g_b_angular * (1.0 / d.delta_b - 1.0 / d.delta_m)
    return g_eff ** 2 * (1.0 / (d.midpoint_offset + eta) - 1.0 / d.midpoint_offset)


def dressed_energies(params: DeviceParams, omega_q: float,
                     labels: Optional[Iterable[BasisLabel]] = None) -> Dict[BasisLabel, float]:
    """Exact energies of every dressed state (or only `labels`), keyed by bare label."""
    labels = tuple(labels) if labels is not None else None
    hamiltonian = assemble_hamiltonian(params, omega_q)
    energies = {}
    for n_exc in (0, 1, 2):
        system = diagonalize_block(hamiltonian, n_exc, labels)
        for label in system.labels:
            energies[label] = system.energy(label)
    return energies


def omega_zz_exact(params: DeviceParams, omega_q: float) -> float:
    energies = dressed_energies(params, omega_q, ZZ_LABELS)
    return _zz_from_energies(energies)


def _zz_from_energies(energies: Dict[BasisLabel, float]) -> float:
    return energies[MEMORY_BUS] + energies[GROUND] - energies[MEMORY] - energies[BUS]


def omega_zz(params: DeviceParams, omega_q: float, full_spectrum: bool = False) -> ZZReport:
    """Exact ZZ coupling with the perturbative values as diagnostics.

    Only the four states entering Omega_ZZ are labeled. With `full_spectrum` the report also
    carries every dressed energy when the whole spectrum can be labeled.
    """
    d = detunings(params, omega_q)
    energies = dressed_energies(params, omega_q, ZZ_LABELS)
    if full_spectrum:
        try:
            energies = dressed_energies(params, omega_q)
        except LabelingError as error:
            logger.warning("[Spectra] full spectrum unlabeled at omega_q=%.6g rad/ns: %s", omega_q, error)
    return ZZReport(
        omega_q=float(omega_q),
        omega_zz_exact=_zz_from_energies(energies),
        omega_zz_4th=omega_zz_fourth_order(params, omega_q),
        omega_zz_eta_pert=omega_zz_eta_perturbative(params, omega_q),
        omega_zz_repulsion=omega_zz_level_repulsion(params, omega_q),
        amplitudes_2nd=second_order_amplitudes(params, omega_q),
        energies=energies,
        near_degenerate=d.near_degenerate,
    )


@dataclass(frozen=True)
class GdShift:
    """Direct-coupling shifts of the single and double excitation energies (rad/ns)."""
    shift_single: float  # change of eps_100 + eps_001
    shift_double: float  # change of eps_101

    @property
    def omega_zz_change(self) -> float:
        return self.shift_double - self.shift_single


def gd_shift_cancellation(params: DeviceParams, omega_q: float) -> GdShift:
    """Compare dressed energies with and without the direct memory-bus coupling."""
    without = dressed_energies(params.replace(include_gd=False), omega_q, ZZ_LABELS)
    with_gd = dressed_energies(params.replace(include_gd=True), omega_q, ZZ_LABELS)
    shift_single = (with_gd[MEMORY] + with_gd[BUS]) - (without[MEMORY] + without[BUS])
    shift_double = with_gd[MEMORY_BUS] - without[MEMORY_BUS]
    return GdShift(shift_single=shift_single, shift_double=shift_double)


def gd_shift_fourth_order(params: DeviceParams, omega_q: float) -> float:
    """2 g_d g_m g_b / (Delta_m Delta_b), the leading shift of each side."""
    d = detunings(params, omega_q, warn=False)
    g_d = 2.0 * params.g_m_angular * params.g_b_angular / omega_q
    return 2.0 * g_d * params.g_m_angular * params.g_b_angular / (d.delta_m * d.delta_b)
