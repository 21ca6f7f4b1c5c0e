"""Conversions between linear GHz inputs and internal angular rad/ns."""

import numpy as np

TWO_PI = 2.0 * np.pi


def to_angular(f_ghz):
    """Linear frequency (GHz) to angular frequency (rad/ns)."""
    return TWO_PI * f_ghz


def to_ghz(omega):
    return omega / TWO_PI


def to_mhz(omega):
    return omega / TWO_PI * 1e3
