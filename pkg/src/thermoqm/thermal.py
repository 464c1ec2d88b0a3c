"""Self-consistent finite-temperature levels and ensemble bookkeeping.

At temperature T > 0 every level is shifted by k_B T ln(g_i p_i), where
p_i is the Boltzmann probability of the *shifted* level.  Solving that
self-consistency gives

    E_i(T) = E_i(0)/2 + (k_B T/2) ln g_i - k_B T ln sqrt(Z),
    sqrt(Z) = sum_i sqrt(g_i) exp(-E_i(0) / (2 k_B T)),

which ``sqrt_partition_closed`` evaluates directly and
``fixed_point_partition`` reaches by iteration.  At T = 0 the levels are
left untouched; that branch is exact and never taken as a limit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import NATURAL, UnitSystem, beta_of
from .eigensolver import (ALL_ONES, DegeneracyPolicy, TridiagonalHamiltonian, ZeroTSpectrum,
                          solve_spectrum)
from .errors import ConvergenceError, TailBoundError

TAIL_TOL = 1e-8


def _logsumexp(a: np.ndarray) -> float:
    m = float(np.max(a))
    return m + math.log(float(np.sum(np.exp(a - m))))


def _half_log_terms(spectrum: ZeroTSpectrum, T: float, units: UnitSystem) -> np.ndarray:
    """ln of sqrt(g_i) exp(-E_i(0) / (2 k_B T)), one entry per level."""
    beta = beta_of(T, units)
    return 0.5 * np.log(spectrum.degeneracies) - 0.5 * beta * spectrum.energies


def check_tail(spectrum: ZeroTSpectrum, T: float, units: UnitSystem = NATURAL,
               tail_tol: float | None = TAIL_TOL) -> None:
    """Verify that truncating ``spectrum`` costs less than ``tail_tol`` in sqrt(Z).

    The neglected levels are bounded by a geometric series continuing the
    last two terms of the sqrt(Z) sum.  Complete (non-truncated) spectra
    and ``tail_tol=None`` skip the check.
    """
    if tail_tol is None or not spectrum.truncated:
        return
    if len(spectrum) < 2:
        raise TailBoundError("a truncated spectrum needs at least two levels "
                             "to bound its tail")
    a = _half_log_terms(spectrum, T, units)
    log_r = a[-1] - a[-2]
    if log_r >= 0:
        raise TailBoundError(
            f"sqrt(Z) terms are not decreasing at the truncation (ratio "
            f"{math.exp(log_r):.6g} at T={T!r}); supply more levels")
    log_tail = a[-1] - math.log(-math.expm1(log_r))
    log_sqrt_z = _logsumexp(a)
    if log_tail >= math.log(tail_tol) + log_sqrt_z:
        raise TailBoundError(
            f"truncated tail {math.exp(log_tail - log_sqrt_z):.3e} (relative to sqrt(Z)) "
            f"exceeds {tail_tol:g} at T={T!r} with {len(spectrum)} levels")


def log_sqrt_partition(spectrum: ZeroTSpectrum, T: float, units: UnitSystem = NATURAL,
                       tail_tol: float | None = TAIL_TOL) -> float:
    if len(spectrum) == 0:
        raise ValueError("empty spectrum")
    check_tail(spectrum, T, units, tail_tol)
    return _logsumexp(_half_log_terms(spectrum, T, units))


def sqrt_partition_closed(spectrum: ZeroTSpectrum, T: float, units: UnitSystem = NATURAL,
                          tail_tol: float | None = TAIL_TOL) -> float:
    """Closed-form sqrt(Z(T)) = sum_i sqrt(g_i) exp(-E_i(0) / (2 k_B T))."""
    return math.exp(log_sqrt_partition(spectrum, T, units, tail_tol))


@dataclass(frozen=True, eq=False)
class ThermalSpectrum:
    """Levels at one temperature.

    ``probabilities`` are per state of a level (p_i), so the normalisation
    is ``sum(g * p) == 1``.  At T = 0, ``beta`` is inf, ``sqrt_z`` is nan
    and the probabilities are the T -> 0+ occupation of the ground level.
    """

    T: float
    beta: float
    sqrt_z: float
    energies: np.ndarray
    probabilities: np.ndarray
    degeneracies: np.ndarray
    energies_zero: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return self.energies.size

    @property
    def Z(self) -> float:
        return self.sqrt_z**2

    @property
    def shifts(self) -> np.ndarray:
        """Per-level temperature term k_B T ln(g_i p_i) = E_i(T) - E_i(0)."""
        return self.energies - self.energies_zero


def thermal_energies(spectrum: ZeroTSpectrum, T: float, units: UnitSystem = NATURAL,
                     tail_tol: float | None = TAIL_TOL) -> ThermalSpectrum:
    g = spectrum.degeneracies
    e0 = spectrum.energies
    if not T >= 0:
        raise ValueError(f"temperature must be >= 0, got {T!r}")
    if T == 0:
        p = np.zeros(e0.size)
        p[0] = 1.0 / g[0]
        return ThermalSpectrum(0.0, math.inf, math.nan, e0.copy(), p, g, e0)

    beta = beta_of(T, units)
    kT = units.k_B * T
    log_sqrt_z = log_sqrt_partition(spectrum, T, units, tail_tol)
    energies = 0.5 * e0 + 0.5 * kT * np.log(g) - kT * log_sqrt_z
    p = np.exp(-beta * energies - 2.0 * log_sqrt_z)
    return ThermalSpectrum(float(T), beta, math.exp(log_sqrt_z), energies, p, g, e0)


def fixed_point_partition(spectrum: ZeroTSpectrum, T: float, units: UnitSystem = NATURAL,
                          tol: float = 1e-12, max_iter: int = 500, damping: float = 1.0,
                          z0: float | None = None,
                          tail_tol: float | None = TAIL_TOL) -> float:
    """sqrt(Z(T)) by iterating Z <- sum_i g_i exp(-beta E_i(T; Z)).

    The update is carried out on ln Z.  Iteration stops when the relative
    change of Z drops below ``tol``.  ``damping`` mixes the new iterate
    with the previous one; the default start is the T-independent
    Boltzmann sum over E_i(0).
    """
    if not tol > 0:
        raise ValueError(f"tolerance must be > 0, got {tol!r}")
    if not 0 < damping <= 1:
        raise ValueError(f"damping must be in (0, 1], got {damping!r}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter!r}")
    beta = beta_of(T, units)
    check_tail(spectrum, T, units, tail_tol)
    kT = units.k_B * T
    g = spectrum.degeneracies
    log_g = np.log(g)
    e0 = spectrum.energies
    if z0 is None:
        log_z = _logsumexp(log_g - beta * e0)
    else:
        if not z0 > 0:
            raise ValueError(f"initial Z must be > 0, got {z0!r}")
        log_z = math.log(z0)

    for _ in range(max_iter):
        energies = 0.5 * e0 + 0.5 * kT * log_g - 0.5 * kT * log_z
        log_z_new = _logsumexp(log_g - beta * energies)
        if damping < 1:
            log_z_new = np.logaddexp(math.log1p(-damping) + log_z,
                                     math.log(damping) + log_z_new)
        change = abs(math.expm1(log_z_new - log_z))
        log_z_prev, log_z = log_z, float(log_z_new)
        if change < tol:
            return math.exp(0.5 * log_z)
    raise ConvergenceError(
        f"self-consistent Z did not converge to {tol:g} in {max_iter} iterations "
        f"(last iterates {math.exp(log_z_prev)!r}, {math.exp(log_z)!r})",
        iterations=max_iter, iterates=(math.exp(log_z_prev), math.exp(log_z)))


def adaptive_spectrum(H: TridiagonalHamiltonian, T_max: float, units: UnitSystem = NATURAL,
                      k_min: int = 8, tail_tol: float = TAIL_TOL,
                      policy: DegeneracyPolicy = ALL_ONES, method: str = "sturm",
                      vectors: bool = False) -> ZeroTSpectrum:
    """Solve for just enough levels that the tail bound holds at ``T_max``.

    The level count doubles from ``k_min``; running out of grid states
    raises ``TailBoundError``.
    """
    k = max(2, int(k_min))
    while True:
        k = min(k, H.size)
        spectrum = solve_spectrum(H, k, method=method, vectors=vectors, policy=policy)
        if T_max <= 0:
            return spectrum
        try:
            check_tail(spectrum, T_max, units, tail_tol)
            return spectrum
        except TailBoundError:
            if k == H.size:
                raise
        k *= 2


# -- thermodynamic bookkeeping --------------------------------------------

def _check_gp(g, p) -> None:
    if int(g) != g or g < 1:
        raise ValueError(f"degeneracy must be an integer >= 1, got {g!r}")
    if not 0 < p <= 1:
        raise ValueError(f"probability must be in (0, 1], got {p!r}")


def microscopic_entropy(g: int, p: float, units: UnitSystem = NATURAL) -> float:
    """-k_B ln(g p)."""
    _check_gp(g, p)
    return -units.k_B * math.log(g * p)


def single_particle_free_energy(kin: float, pot: float, g: int, p: float, T: float,
                                units: UnitSystem = NATURAL) -> float:
    """kin + pot + k_B T ln(g p)."""
    _check_gp(g, p)
    if not T >= 0:
        raise ValueError(f"temperature must be >= 0, got {T!r}")
    return kin + pot + units.k_B * T * math.log(g * p)


@dataclass(frozen=True)
class ParticleTerms:
    kin: float
    pot: float
    g: int = 1
    p: float = 1.0

    def __post_init__(self):
        _check_gp(self.g, self.p)


@dataclass(frozen=True)
class Microstate:
    P: float
    particles: tuple[ParticleTerms, ...]
    pair_energy: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "particles", tuple(self.particles))
        if not self.P >= 0:
            raise ValueError(f"state probability must be >= 0, got {self.P!r}")


@dataclass(frozen=True)
class EnsembleDescription:
    states: tuple[Microstate, ...]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        if not self.states:
            raise ValueError("ensemble has no states")
        total = math.fsum(s.P for s in self.states)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"state probabilities sum to {total!r}, not 1")


@dataclass(frozen=True)
class EnsembleAggregates:
    U: float
    F: float
    S: float
    T: float
    state_U: tuple[float, ...]
    state_F: tuple[float, ...]
    state_S: tuple[float, ...]

    @property
    def closure_residual(self) -> float:
        """|F - (U - T S)| relative to the largest of |F|, |U|, |T S|."""
        ts = self.T * self.S
        scale = max(abs(self.F), abs(self.U), abs(ts), np.finfo(float).tiny)
        return abs(self.F - (self.U - ts)) / scale


def ensemble_aggregates(ens: EnsembleDescription, T: float,
                        units: UnitSystem = NATURAL) -> EnsembleAggregates:
    """Macroscopic U, F and S as probability-weighted microstate averages.

    The free energy is accumulated from per-state free energies (kinetic +
    potential + pair energy + k_B T sum ln(g p)), independently of U and S,
    so that ``closure_residual`` is a genuine check of F = U - T S.
    """
    if not T >= 0:
        raise ValueError(f"temperature must be >= 0, got {T!r}")
    kT = units.k_B * T
    state_u, state_f, state_s = [], [], []
    for state in ens.states:
        mech = math.fsum([pt.kin + pt.pot for pt in state.particles] + [state.pair_energy])
        logs = math.fsum(math.log(pt.g * pt.p) for pt in state.particles)
        state_u.append(mech)
        state_s.append(-units.k_B * logs)
        state_f.append(math.fsum([pt.kin + pt.pot + kT * math.log(pt.g * pt.p)
                                  for pt in state.particles] + [state.pair_energy]))
    P = [s.P for s in ens.states]
    U = math.fsum(p * u for p, u in zip(P, state_u))
    S = math.fsum(p * s for p, s in zip(P, state_s))
    F = math.fsum(p * f for p, f in zip(P, state_f))
    return EnsembleAggregates(U, F, S, float(T), tuple(state_u), tuple(state_f), tuple(state_s))


def temperature_sweep(spectrum: ZeroTSpectrum, temperatures: Sequence[float],
                      units: UnitSystem = NATURAL,
                      tail_tol: float | None = TAIL_TOL) -> list[ThermalSpectrum]:
    return [thermal_energies(spectrum, T, units, tail_tol) for T in temperatures]
