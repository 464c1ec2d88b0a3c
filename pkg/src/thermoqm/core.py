"""Units, grids and potentials shared by every other module."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import ZeroTemperatureError


@dataclass(frozen=True)
class UnitSystem:
    """Physical constants in a consistent unit system.

    The default instance is natural units, hbar = k_B = m = 1, so that
    Planck's constant is 2*pi.
    """

    hbar: float = 1.0
    k_B: float = 1.0
    mass_default: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "k_B", "mass_default"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")

    @property
    def h_planck(self) -> float:
        return 2.0 * math.pi * self.hbar

    @classmethod
    def si(cls, mass: float | None = None) -> "UnitSystem":
        """CODATA SI constants; the default mass is the electron mass."""
        from scipy import constants

        return cls(hbar=constants.hbar, k_B=constants.k,
                   mass_default=constants.m_e if mass is None else mass)


NATURAL = UnitSystem()


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise ValueError("grid bounds must be finite")
        if self.x_max <= self.x_min:
            raise ValueError(
                f"degenerate interval: x_max={self.x_max!r} <= x_min={self.x_min!r}")
        if int(self.n_points) != self.n_points or self.n_points < 3:
            raise ValueError(f"n_points must be an integer >= 3, got {self.n_points!r}")

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)


def make_grid(x_min: float, x_max: float, n_points: int) -> Grid1D:
    if isinstance(n_points, float) and n_points.is_integer():
        n_points = int(n_points)
    return Grid1D(float(x_min), float(x_max), n_points)


@dataclass(frozen=True)
class Harmonic:
    mass: float = 1.0
    omega: float = 1.0
    offset: float = 0.0

    def __post_init__(self):
        if not (self.mass > 0 and math.isfinite(self.mass)):
            raise ValueError(f"harmonic mass must be > 0, got {self.mass!r}")
        if not (self.omega > 0 and math.isfinite(self.omega)):
            raise ValueError(f"harmonic omega must be > 0, got {self.omega!r}")
        if not math.isfinite(self.offset):
            raise ValueError("offset must be finite")


@dataclass(frozen=True)
class InfiniteWell:
    """Hard walls at the two grid ends, flat (= offset) inside.

    The walls are imposed as Dirichlet conditions by the eigensolver, so
    ``width`` must match the extent of the grid it is evaluated on.
    """

    width: float
    offset: float = 0.0

    def __post_init__(self):
        if not (self.width > 0 and math.isfinite(self.width)):
            raise ValueError(f"well width must be > 0, got {self.width!r}")
        if not math.isfinite(self.offset):
            raise ValueError("offset must be finite")


@dataclass(frozen=True, eq=False)
class Tabulated:
    values: np.ndarray = field(repr=False)
    offset: float = 0.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise ValueError("tabulated potential must be one-dimensional")
        if not np.all(np.isfinite(values)):
            raise ValueError("tabulated potential contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


PotentialSpec = Union[Harmonic, InfiniteWell, Tabulated]


def eval_potential(spec: PotentialSpec, grid: Grid1D) -> np.ndarray:
    """Sample ``spec`` on every grid point."""
    x = grid.points
    if isinstance(spec, Harmonic):
        values = 0.5 * spec.mass * spec.omega**2 * x**2
    elif isinstance(spec, InfiniteWell):
        if abs(spec.width - grid.length) > 1e-12 * max(spec.width, grid.length):
            raise ValueError(
                f"well width {spec.width!r} does not match grid extent {grid.length!r}")
        values = np.zeros_like(x)
    elif isinstance(spec, Tabulated):
        if spec.values.shape[0] != grid.n_points:
            raise ValueError(
                f"tabulated potential has {spec.values.shape[0]} values, "
                f"grid has {grid.n_points} points")
        values = spec.values.copy()
    else:
        raise TypeError(f"unknown potential spec {type(spec).__name__}")
    return values + spec.offset


def beta_of(T: float, units: UnitSystem = NATURAL) -> float:
    """Inverse temperature 1/(k_B T); T = 0 has no beta and is rejected."""
    if not T > 0:
        raise ZeroTemperatureError(
            f"beta is undefined at T={T!r}; use the explicit zero-temperature branch")
    return 1.0 / (units.k_B * T)
