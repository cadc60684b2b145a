"""Atomic-unit conversions and derived field quantities.

Everything downstream works in Hartree atomic units; this module is the
single place where eV, fs and W/cm^2 inputs are converted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "PhysicalConstants",
    "CONSTANTS",
    "ev_to_au",
    "au_to_ev",
    "fs_to_au",
    "au_to_fs",
    "intensity_to_field",
    "rabi_peak",
]


@dataclass(frozen=True)
class PhysicalConstants:
    """Conversion constants pinning the simulator's unit system.

    Attributes
    ----------
    hartree_in_ev : float
        One Hartree expressed in eV.
    au_time_in_fs : float
        One atomic time unit expressed in fs.
    reference_intensity : float
        Atomic unit of intensity in W/cm^2 (field amplitude 1 a.u.).
    """

    hartree_in_ev: float = 27.211386
    au_time_in_fs: float = 0.02418884
    reference_intensity: float = 3.50945e16

    def __post_init__(self) -> None:
        for name in ("hartree_in_ev", "au_time_in_fs", "reference_intensity"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")


CONSTANTS = PhysicalConstants()


def ev_to_au(energy_ev: float, constants: PhysicalConstants = CONSTANTS) -> float:
    """Convert an energy from eV to Hartree."""
    return energy_ev / constants.hartree_in_ev


def au_to_ev(energy_au: float, constants: PhysicalConstants = CONSTANTS) -> float:
    """Convert an energy from Hartree to eV."""
    return energy_au * constants.hartree_in_ev


def fs_to_au(time_fs: float, constants: PhysicalConstants = CONSTANTS) -> float:
    """Convert a time from fs to atomic units."""
    return time_fs / constants.au_time_in_fs


def au_to_fs(time_au: float, constants: PhysicalConstants = CONSTANTS) -> float:
    """Convert a time from atomic units to fs."""
    return time_au * constants.au_time_in_fs


def intensity_to_field(
    intensity_w_cm2: float, constants: PhysicalConstants = CONSTANTS
) -> float:
    """Peak field amplitude E0 (a.u.) for a given peak intensity in W/cm^2."""
    if intensity_w_cm2 < 0.0:
        raise ValueError(f"intensity must be non-negative, got {intensity_w_cm2}")
    return math.sqrt(intensity_w_cm2 / constants.reference_intensity)


def rabi_peak(z_ba: float, e0: float) -> float:
    """Peak Rabi frequency z_ba * E0 (a.u.) of the ionic two-level coupling."""
    return z_ba * e0
