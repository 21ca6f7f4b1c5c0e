import math

import pytest

from src.budget.estimators import ArchitectureParams
from src.hamiltonian.system import DeviceParams
from src.move.design import MoveDesign
from src.move.families import Direction, MoveMode, PiecewiseLinearFamily
from src.units import to_angular


@pytest.fixture
def device():
    """f_m = 7, f_b = 6, eta = 0.2, g_m = g_b = 25 MHz."""
    return DeviceParams(f_m=7.0, f_b=6.0, eta=0.2, g_m=0.025, g_b=0.025)


@pytest.fixture
def strong_device(device):
    return device.replace(g_m=0.05, g_b=0.05)


@pytest.fixture
def decoupled_bus(device):
    return device.replace(g_b=0.0)


@pytest.fixture
def architecture():
    """One section with g = 25 MHz and Delta = 500 MHz everywhere."""
    return ArchitectureParams.symmetric(1, 1, to_angular(0.025), to_angular(0.5))


@pytest.fixture
def eta():
    return to_angular(0.2)


@pytest.fixture
def pl_family():
    return PiecewiseLinearFamily(6.7, 6.5)


@pytest.fixture
def plain_move(device):
    """Single straight front ramp at resonance with a pi/2g flat part; no shaping."""
    family = PiecewiseLinearFamily(6.7, 6.5)
    return MoveDesign(
        family=family.name,
        direction=Direction.QUBIT_TO_MEMORY,
        mode=MoveMode.ANALYTIC,
        f_m=device.f_m,
        f_start=family.f_start,
        f_end=family.f_end,
        front=family.default_front(device),
        overshoot=0.0,
        tau=0.0,
        flat_duration=math.pi / (2.0 * device.g_m_angular),
        varphi=0.0,
        achieved_error=math.nan,
    )
