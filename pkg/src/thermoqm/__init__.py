"""Finite-temperature bound states in one dimension.

Zero-temperature spectra of 1D Hamiltonians, self-consistent
temperature-dependent levels and partition function, transition
frequency shifts, stationary-state dynamics and the thermodynamic
bookkeeping behind them.
"""

__version__ = "0.1.0"

from .core import (NATURAL, Grid1D, Harmonic, InfiniteWell, Tabulated, UnitSystem, beta_of,
                   eval_potential, make_grid)
from .eigensolver import (ALL_ONES, ClusterDegeneracy, ExplicitDegeneracy,
                          TridiagonalHamiltonian, ZeroTSpectrum, assign_degeneracies,
                          discretize_hamiltonian, solve_spectrum)
from .errors import (ConfigError, ConsistencyError, ConvergenceError, TailBoundError,
                     ThermoQMError, UnsupportedInteractionError, ZeroTemperatureError)
from .thermal import (EnsembleDescription, Microstate, ParticleTerms, ThermalSpectrum,
                      adaptive_spectrum, ensemble_aggregates, fixed_point_partition,
                      microscopic_entropy, single_particle_free_energy, sqrt_partition_closed,
                      thermal_energies)
from .oscillator import (OscillatorParams, ho_energy_thermal, ho_energy_zero_T, ho_spectrum,
                         ho_sqrt_partition)
from .spectroscopy import (TransitionShift, shift_between_temperatures, shift_slope,
                           transition_frequency)
from .dynamics import (Component, LagrangianSample, WaveField, euler_lagrange_residual,
                       evolve_stationary, evolve_superposition, lagrangian_density,
                       phase_factor)
from .multiparticle import MultiParticleConfig, ProductState, multiparticle_thermal_energy

__all__ = [
    "NATURAL", "Grid1D", "Harmonic", "InfiniteWell", "Tabulated", "UnitSystem", "beta_of",
    "eval_potential", "make_grid", "ALL_ONES", "ClusterDegeneracy", "ExplicitDegeneracy",
    "TridiagonalHamiltonian", "ZeroTSpectrum", "assign_degeneracies", "discretize_hamiltonian",
    "solve_spectrum", "ConfigError", "ConsistencyError", "ConvergenceError", "TailBoundError",
    "ThermoQMError", "UnsupportedInteractionError", "ZeroTemperatureError",
    "EnsembleDescription", "Microstate", "ParticleTerms", "ThermalSpectrum",
    "adaptive_spectrum", "ensemble_aggregates", "fixed_point_partition", "microscopic_entropy",
    "single_particle_free_energy", "sqrt_partition_closed", "thermal_energies",
    "OscillatorParams", "ho_energy_thermal", "ho_energy_zero_T", "ho_spectrum",
    "ho_sqrt_partition", "TransitionShift", "shift_between_temperatures", "shift_slope",
    "transition_frequency", "Component", "LagrangianSample", "WaveField",
    "euler_lagrange_residual", "evolve_stationary", "evolve_superposition",
    "lagrangian_density", "phase_factor", "MultiParticleConfig", "ProductState",
    "multiparticle_thermal_energy",
]
