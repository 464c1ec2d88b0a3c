"""Time evolution of thermal stationary states and Lagrangian checks.

A level evolves by the pure phase exp(-i E_i(T) t / hbar); there is no
time stepping.  The temperature term k_B T ln(g p) carries no spatial
dependence, so for dynamics it is a per-level constant ``tau``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .core import NATURAL, Grid1D, UnitSystem
from .eigensolver import TridiagonalHamiltonian, ZeroTSpectrum
from .thermal import ThermalSpectrum

NORM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class WaveField:
    """Complex amplitudes on a grid at time ``t`` and temperature ``T``.

    ``level`` is the index of the stationary state represented, or None
    for a superposition.
    """

    values: np.ndarray = field(repr=False)
    grid: Grid1D
    t: float = 0.0
    T: float = 0.0
    level: int | None = None

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        if values.shape != (self.grid.n_points,):
            raise ValueError(
                f"field has shape {values.shape}, grid has {self.grid.n_points} points")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def norm(self) -> float:
        """Squared norm sum |psi|^2 * spacing."""
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.spacing)

    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def normalized(self) -> "WaveField":
        n = self.norm()
        if n == 0:
            raise ValueError("cannot normalise a null field")
        return WaveField(self.values / math.sqrt(n), self.grid, self.t, self.T, self.level)


@dataclass(frozen=True, eq=False)
class LagrangianSample:
    density: np.ndarray = field(repr=False)
    total: float


@dataclass(frozen=True, eq=False)
class Component:
    coeff: complex
    psi: WaveField
    E_T: float


def phase_factor(E: float, t: float, units: UnitSystem = NATURAL) -> complex:
    """exp(-i E t / hbar)."""
    return cmath.exp(-1j * E * t / units.hbar)


def temperature_term(T: float, g: int, p: float, units: UnitSystem = NATURAL) -> float:
    """tau = k_B T ln(g p); zero at T = 0."""
    if T == 0:
        return 0.0
    if not 0 < p <= 1:
        raise ValueError(f"probability must be in (0, 1], got {p!r}")
    return units.k_B * T * math.log(g * p)


def _require_normalized(psi: WaveField, what: str = "field") -> None:
    if abs(psi.norm() - 1.0) > NORM_TOL:
        raise ValueError(f"{what} is not normalised (norm {psi.norm()!r})")


def stationary_state(spectrum: ZeroTSpectrum, thermal: ThermalSpectrum, i: int,
                     t: float = 0.0, units: UnitSystem = NATURAL) -> WaveField:
    """Level ``i`` of ``spectrum`` evolved to time ``t`` with its energy at ``thermal.T``."""
    if spectrum.psi is None:
        raise ValueError("spectrum carries no eigenfunctions")
    psi0 = WaveField(spectrum.psi[i], spectrum.grid, 0.0, thermal.T, i)
    return evolve_stationary(psi0, float(thermal.energies[i]), t, units)


def evolve_stationary(psi0: WaveField, E_T: float, t: float,
                      units: UnitSystem = NATURAL) -> WaveField:
    """Advance a stationary state by ``t``: psi -> psi * exp(-i E_T t / hbar)."""
    _require_normalized(psi0)
    values = psi0.values * phase_factor(E_T, t, units)
    return WaveField(values, psi0.grid, psi0.t + t, psi0.T, psi0.level)


def evolve_superposition(components: Sequence[Component], t: float,
                         units: UnitSystem = NATURAL) -> WaveField:
    """Sum of independently phased levels at time ``t``.

    Each component's field is taken at its own t = 0.  The coefficients
    must satisfy sum |c|^2 = 1 and the fields must share one grid.
    """
    if not components:
        raise ValueError("no components")
    grid = components[0].psi.grid
    for comp in components:
        if comp.psi.grid != grid:
            raise ValueError("components live on different grids")
        _require_normalized(comp.psi, "component field")
    weight = math.fsum(abs(c.coeff) ** 2 for c in components)
    if abs(weight - 1.0) > NORM_TOL:
        raise ValueError(f"coefficients are not normalised (sum |c|^2 = {weight!r})")
    values = np.zeros(grid.n_points, dtype=complex)
    for comp in components:
        values += comp.coeff * phase_factor(comp.E_T, t, units) * comp.psi.values
    level = components[0].psi.level if len(components) == 1 else None
    return WaveField(values, grid, t, components[0].psi.T, level)


def density_beat_frequency(components: Sequence[Component], x_index: int, t_end: float,
                           samples: int = 20000, units: UnitSystem = NATURAL) -> float:
    """Measure the oscillation frequency of |psi(x, t)|^2 at one grid point.

    For two components the density is a constant plus one cosine; its
    crossings of the constant part are located on a sampled window
    [0, t_end] and refined with Brent's method, and the frequency comes
    from the first and last crossing.
    """
    if len(components) != 2:
        raise ValueError("beat measurement needs exactly two components")
    mean = sum(abs(c.coeff * c.psi.values[x_index]) ** 2 for c in components)

    def excess(t):
        return float(abs(evolve_superposition(components, t, units).values[x_index]) ** 2
                     - mean)

    ts = np.linspace(0.0, t_end, samples)
    vals = np.array([excess(t) for t in ts])
    crossings = []
    for a, b, fa, fb in zip(ts[:-1], ts[1:], vals[:-1], vals[1:]):
        if fa == 0:
            crossings.append(a)
        elif fa * fb < 0:
            crossings.append(brentq(excess, a, b, xtol=1e-14, rtol=4 * np.finfo(float).eps))
    if len(crossings) < 3:
        raise ValueError("window too short: fewer than three crossings found")
    half_periods = len(crossings) - 1
    return half_periods / (2.0 * (crossings[-1] - crossings[0]))


def time_derivative(psi: WaveField, E_T: float, units: UnitSystem = NATURAL) -> np.ndarray:
    """d psi / dt of a stationary state: -i E_T psi / hbar."""
    return -1j * E_T / units.hbar * psi.values


def lagrangian_density(psi: WaveField, dpsi_dt, T: float, g: int, p: float, V,
                       units: UnitSystem = NATURAL, mass: float | None = None
                       ) -> LagrangianSample:
    """Real part of i hbar psi* dpsi/dt - hbar^2/(2m) |dpsi/dx|^2 - (V + tau) |psi|^2.

    The spatial derivative is a central difference (second-order one-sided
    at the two ends); ``total`` is the grid integral.
    """
    dpsi_dt = np.asarray(dpsi_dt, dtype=complex)
    V = np.asarray(V, dtype=float)
    n = psi.grid.n_points
    if dpsi_dt.shape != (n,) or V.shape != (n,):
        raise ValueError("dpsi_dt and V must have one value per grid point")
    mass = units.mass_default if mass is None else mass
    tau = temperature_term(T, g, p, units)
    values = psi.values
    dpsi_dx = np.gradient(values, psi.grid.spacing, edge_order=2)
    rho = np.abs(values) ** 2
    dens = np.real(1j * units.hbar * np.conj(values) * dpsi_dt) \
        - units.hbar**2 / (2 * mass) * np.abs(dpsi_dx) ** 2 - (V + tau) * rho
    return LagrangianSample(dens, float(np.sum(dens) * psi.grid.spacing))


def euler_lagrange_residual(psi: WaveField, E_T: float, tau: float,
                            H: TridiagonalHamiltonian) -> float:
    """Relative residual of the stationary field equation and its conjugate.

    ||(H + tau - E_T) v|| / ||H v|| for v = psi and v = conj(psi) on the
    interior points; the larger of the two is returned.
    """
    if psi.grid != H.grid:
        raise ValueError("field and Hamiltonian live on different grids")
    out = 0.0
    for v in (psi.values[1:-1], np.conj(psi.values[1:-1])):
        hv = H.matvec(v)
        denom = np.linalg.norm(hv)
        if denom == 0:
            raise ValueError("null field: residual undefined")
        out = max(out, float(np.linalg.norm(hv + (tau - E_T) * v) / denom))
    return out
