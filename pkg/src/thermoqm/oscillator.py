"""Closed-form harmonic oscillator, with and without temperature.

With unit degeneracies the self-consistent levels are evenly spaced by
hbar*omega/2 at every T > 0:

    E_n(T) = (n + 1)/2 hbar omega + k_B T ln(1 - exp(-hbar omega / (2 k_B T)))

Letting T -> 0+ leaves (n + 1)/2 hbar omega, which is *not* the T = 0
level (n + 1/2) hbar omega once n >= 1.  Both branches are kept as they
are; ``zero_temperature_gap`` exposes the difference.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import NATURAL, UnitSystem, beta_of
from .eigensolver import ZeroTSpectrum


@dataclass(frozen=True)
class OscillatorParams:
    omega_osc: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not (self.omega_osc > 0 and math.isfinite(self.omega_osc)):
            raise ValueError(f"omega_osc must be > 0, got {self.omega_osc!r}")
        if not (self.mass > 0 and math.isfinite(self.mass)):
            raise ValueError(f"mass must be > 0, got {self.mass!r}")


def _check_level(n) -> int:
    if int(n) != n or n < 0:
        raise ValueError(f"level index must be a non-negative integer, got {n!r}")
    return int(n)


def ho_energy_zero_T(n: int, params: OscillatorParams, units: UnitSystem = NATURAL) -> float:
    n = _check_level(n)
    return (n + 0.5) * units.hbar * params.omega_osc


def ho_sqrt_partition(params: OscillatorParams, T: float, units: UnitSystem = NATURAL) -> float:
    """exp(-hbar w / (4 k_B T)) / (1 - exp(-hbar w / (2 k_B T)))."""
    x = units.hbar * params.omega_osc * beta_of(T, units) / 2
    return math.exp(-x / 2) / -math.expm1(-x)


def ho_energy_thermal(n: int, params: OscillatorParams, T: float,
                      units: UnitSystem = NATURAL) -> float:
    n = _check_level(n)
    if not T >= 0:
        raise ValueError(f"temperature must be >= 0, got {T!r}")
    if T == 0:
        return ho_energy_zero_T(n, params, units)
    hw = units.hbar * params.omega_osc
    kT = units.k_B * T
    return 0.5 * (n + 1) * hw + kT * math.log(-math.expm1(-hw / (2 * kT)))


def ho_energy_low_T_limit(n: int, params: OscillatorParams, units: UnitSystem = NATURAL) -> float:
    """Limit of the T > 0 level as T -> 0+, i.e. (n + 1)/2 hbar omega."""
    n = _check_level(n)
    return 0.5 * (n + 1) * units.hbar * params.omega_osc


def zero_temperature_gap(n: int, params: OscillatorParams, units: UnitSystem = NATURAL) -> float:
    """Jump between the exact T = 0 level and the T -> 0+ limit: n/2 hbar omega."""
    return ho_energy_zero_T(n, params, units) - ho_energy_low_T_limit(n, params, units)


def ho_spectrum(params: OscillatorParams, K: int, units: UnitSystem = NATURAL) -> ZeroTSpectrum:
    """Exact levels n = 0..K-1, marked as a truncation of the infinite ladder."""
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K!r}")
    energies = (np.arange(K) + 0.5) * units.hbar * params.omega_osc
    return ZeroTSpectrum.from_levels(energies, truncated=True)
