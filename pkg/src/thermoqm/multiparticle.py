"""Non-interacting many-particle states at finite temperature.

Without pair interactions the N-particle equation separates, so the
eigenfunction is a product of single-particle levels and the energy is
additive: sum_j E_{i_j}(0) + k_B T sum_j ln(g_{i_j} p_{i_j}).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import NATURAL, UnitSystem
from .eigensolver import ZeroTSpectrum
from .errors import UnsupportedInteractionError
from .thermal import TAIL_TOL, thermal_energies
from .dynamics import WaveField


@dataclass(frozen=True)
class MultiParticleConfig:
    """Occupied single-particle levels of one N-particle microstate.

    ``shared_p`` imposes one common probability on every particle; left
    as None, each particle takes the thermal probability of the level it
    occupies.  ``g_per_particle`` overrides the spectrum's degeneracies.
    Any nonzero ``pair_energy`` is rejected: only V_jm = 0 is solvable.
    """

    occupations: tuple[int, ...]
    shared_p: float | None = None
    g_per_particle: tuple[int, ...] | None = None
    pair_energy: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "occupations", tuple(int(i) for i in self.occupations))
        if not self.occupations:
            raise ValueError("need at least one particle")
        if any(i < 0 for i in self.occupations):
            raise ValueError("occupation indices must be >= 0")
        if self.shared_p is not None and not 0 < self.shared_p <= 1:
            raise ValueError(f"shared_p must be in (0, 1], got {self.shared_p!r}")
        if self.g_per_particle is not None:
            g = tuple(self.g_per_particle)
            if len(g) != len(self.occupations):
                raise ValueError("g_per_particle needs one entry per particle")
            if any(int(x) != x or x < 1 for x in g):
                raise ValueError("degeneracies must be integers >= 1")
            object.__setattr__(self, "g_per_particle", tuple(int(x) for x in g))
        if self.pair_energy != 0:
            raise UnsupportedInteractionError(
                "interacting particles (nonzero pair energy) are not supported")

    @property
    def N(self) -> int:
        return len(self.occupations)


def multiparticle_thermal_energy(config: MultiParticleConfig, spectrum: ZeroTSpectrum,
                                 T: float, units: UnitSystem = NATURAL,
                                 tail_tol: float | None = TAIL_TOL) -> float:
    for i in config.occupations:
        if i >= len(spectrum):
            raise IndexError(f"occupation {i} out of range for {len(spectrum)} levels")
    e0 = [float(spectrum.energies[i]) for i in config.occupations]
    if T == 0:
        return math.fsum(e0)
    thermal = thermal_energies(spectrum, T, units, tail_tol)
    gs = (config.g_per_particle if config.g_per_particle is not None
          else [int(spectrum.degeneracies[i]) for i in config.occupations])
    ps = ([config.shared_p] * config.N if config.shared_p is not None
          else [float(thermal.probabilities[i]) for i in config.occupations])
    kT = units.k_B * T
    # one correctly rounded sum of per-particle energies: a pair equals E_a + E_b exactly
    return math.fsum(e + kT * math.log(g * p) for e, g, p in zip(e0, gs, ps))


class ProductState:
    """Psi(x_1, ..., x_N) = prod_j psi_j(x_j) over single-particle fields.

    Calling the object with N coordinates evaluates the product, each
    factor linearly interpolated between grid points (exact on them).
    """

    def __init__(self, fields: Sequence[WaveField]):
        fields = list(fields)
        if not fields:
            raise ValueError("need at least one factor")
        grid = fields[0].grid
        for f in fields:
            if f.grid != grid:
                raise ValueError("factors live on different grids")
            if abs(f.norm() - 1.0) > 1e-10:
                raise ValueError("factors must be normalised")
        self.fields = fields
        self.grid = grid

    @property
    def N(self) -> int:
        return len(self.fields)

    def __call__(self, *xs: float) -> complex:
        if len(xs) != self.N:
            raise ValueError(f"expected {self.N} coordinates, got {len(xs)}")
        x = self.grid.points
        out = 1.0 + 0.0j
        for f, xj in zip(self.fields, xs):
            out *= (np.interp(xj, x, f.values.real) + 1j * np.interp(xj, x, f.values.imag))
        return complex(out)

    def at_indices(self, *ks: int) -> complex:
        out = 1.0 + 0.0j
        for f, k in zip(self.fields, ks):
            out *= f.values[k]
        return complex(out)

    def tensor(self) -> np.ndarray:
        """Dense amplitude array of shape (n_points,) * N."""
        out = self.fields[0].values
        for f in self.fields[1:]:
            out = np.multiply.outer(out, f.values)
        return out

    def norm(self) -> float:
        return math.prod(f.norm() for f in self.fields)
