"""Transition frequencies at finite temperature and their shift law.

Between two temperatures the frequency of the i -> j line moves by

    nu_ij(T1) - nu_ij(T2) = k_B / (2 h) * (T1 - T2) * ln(g_i / g_j)

because the sqrt(Z) terms cancel level-pairwise.  Every shift is
computed both from this closed form and from two independent thermal
solves; a disagreement is an error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .core import NATURAL, UnitSystem
from .eigensolver import ZeroTSpectrum
from .errors import ConsistencyError, ZeroTemperatureError
from .thermal import TAIL_TOL, ThermalSpectrum, thermal_energies

CROSS_CHECK_RTOL = 1e-10


@dataclass(frozen=True)
class TransitionShift:
    i: int
    j: int
    T1: float
    T2: float
    nu_T1: float
    nu_T2: float
    delta_nu: float
    slope: float
    closed_form_delta: float


def _check_index(k, size: int) -> int:
    if int(k) != k or not 0 <= k < size:
        raise IndexError(f"level index {k!r} out of range for {size} levels")
    return int(k)


def transition_frequency(thermal: ThermalSpectrum, i: int, j: int,
                         units: UnitSystem = NATURAL) -> float:
    """(E_i(T) - E_j(T)) / h."""
    i = _check_index(i, len(thermal))
    j = _check_index(j, len(thermal))
    if i == j:
        return 0.0
    return float(thermal.energies[i] - thermal.energies[j]) / units.h_planck


def shift_slope(g_i: int, g_j: int, units: UnitSystem = NATURAL) -> float:
    """d nu_ij / dT = k_B ln(g_i / g_j) / (2 h)."""
    for g in (g_i, g_j):
        if int(g) != g or g < 1:
            raise ValueError(f"degeneracy must be an integer >= 1, got {g!r}")
    if g_i == g_j:
        return 0.0
    # difference of logs keeps slope(i, j) == -slope(j, i) exactly
    return units.k_B * (math.log(g_i) - math.log(g_j)) / (2 * units.h_planck)


def shift_between_temperatures(spectrum: ZeroTSpectrum, i: int, j: int, T1: float, T2: float,
                               units: UnitSystem = NATURAL, rtol: float = CROSS_CHECK_RTOL,
                               tail_tol: float | None = TAIL_TOL) -> TransitionShift:
    """Shift of the i -> j line between T2 and T1 (``delta_nu = nu(T1) - nu(T2)``).

    ``delta_nu`` comes from two thermal solves and ``closed_form_delta``
    from the slope; they must agree within ``rtol`` relative to the
    largest frequency involved, else ``ConsistencyError``.
    """
    for T in (T1, T2):
        if not T > 0:
            raise ZeroTemperatureError(f"shift temperatures must be > 0, got {T!r}")
    i = _check_index(i, len(spectrum))
    j = _check_index(j, len(spectrum))
    nu1 = transition_frequency(thermal_energies(spectrum, T1, units, tail_tol), i, j, units)
    nu2 = transition_frequency(thermal_energies(spectrum, T2, units, tail_tol), i, j, units)
    slope = shift_slope(int(spectrum.degeneracies[i]), int(spectrum.degeneracies[j]), units)
    closed = slope * (T1 - T2)
    delta = nu1 - nu2
    scale = max(abs(nu1), abs(nu2), abs(closed))
    if abs(delta - closed) > rtol * scale:
        raise ConsistencyError(
            f"shift of {i}->{j} between T={T1!r} and T={T2!r}: two-solve "
            f"{delta!r} vs closed form {closed!r} (tolerance {rtol:g} x {scale:.3g})")
    return TransitionShift(i, j, float(T1), float(T2), nu1, nu2, delta, slope, closed)


def shift_table(spectrum: ZeroTSpectrum, pairs: Iterable[tuple[int, int]],
                temperature_pairs: Iterable[tuple[float, float]],
                units: UnitSystem = NATURAL, **kwargs) -> list[TransitionShift]:
    temperature_pairs = list(temperature_pairs)
    return [shift_between_temperatures(spectrum, i, j, T1, T2, units, **kwargs)
            for i, j in pairs for T1, T2 in temperature_pairs]
