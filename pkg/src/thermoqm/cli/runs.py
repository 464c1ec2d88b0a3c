"""Pipelines behind each CLI subcommand."""
from __future__ import annotations

import math

import numpy as np

from ..core import eval_potential
from ..dynamics import (Component, WaveField, density_beat_frequency, evolve_superposition)
from ..eigensolver import (ExplicitDegeneracy, ZeroTSpectrum,
                           discretize_hamiltonian, solve_spectrum)
from ..errors import ConfigError, ConsistencyError
from ..oscillator import (OscillatorParams, ho_energy_low_T_limit, ho_energy_thermal,
                          ho_energy_zero_T, ho_sqrt_partition)
from ..spectroscopy import shift_between_temperatures, transition_frequency
from ..thermal import (EnsembleDescription, Microstate, ParticleTerms, adaptive_spectrum,
                       ensemble_aggregates, fixed_point_partition, thermal_energies)
from .config import HarmonicBlock, RunConfig
from .output import ResultTable

E_T_FORMULA = "E_n(0)/2 + (k_B T/2) ln g_n - k_B T ln sqrt(Z); E_n(0) itself at T = 0"
SQRTZ_FORMULA = "sum_n sqrt(g_n) exp(-E_n(0) / (2 k_B T)); blank at T = 0"


def _hamiltonian(cfg: RunConfig):
    grid = cfg.make_grid()
    units = cfg.unit_system()
    V = eval_potential(cfg.potential_spec(), grid)
    return discretize_hamiltonian(V, grid, cfg.particle_mass(), units)


def solve_levels(cfg: RunConfig, T_max: float = 0.0, vectors: bool = False) -> ZeroTSpectrum:
    """Spectrum for a run, extended until the tail bound holds at ``T_max``.

    An explicit degeneracy table fixes the level count at ``cfg.levels``.
    """
    H = _hamiltonian(cfg)
    if cfg.levels > H.size:
        raise ValueError(f"levels={cfg.levels} exceeds the {H.size} interior grid states")
    policy = cfg.degeneracy_policy()
    if isinstance(policy, ExplicitDegeneracy) or T_max <= 0:
        return solve_spectrum(H, cfg.levels, method=cfg.solver, vectors=vectors, policy=policy)
    return adaptive_spectrum(H, T_max, cfg.unit_system(), k_min=cfg.levels,
                             tail_tol=cfg.tolerances.tail, policy=policy,
                             method=cfg.solver, vectors=vectors)


def run_spectrum(cfg: RunConfig) -> ResultTable:
    spectrum = solve_levels(cfg)
    table = ResultTable("spectrum", ("n", "E_n(0)", "g_n"), provenance={
        "E_n(0)": "eigenvalue of -hbar^2/(2m) d^2/dx^2 + V (3-point finite differences, "
                  "psi = 0 at both grid ends)",
        "g_n": f"degeneracy policy '{cfg.degeneracy.policy}'",
    })
    for n, (e, g) in enumerate(zip(spectrum.energies, spectrum.degeneracies)):
        table.append(n, e, g)
    return table


def run_thermal(cfg: RunConfig) -> ResultTable:
    """One row per (temperature, level) for every level entering Z."""
    units = cfg.unit_system()
    spectrum = solve_levels(cfg, max(cfg.temperatures))
    table = ResultTable("thermal", ("T", "n", "E_n(T)", "p_n", "sqrtZ"), provenance={
        "E_n(T)": E_T_FORMULA,
        "p_n": "exp(-E_n(T) / (k_B T)) / Z per state, sum_n g_n p_n = 1; "
               "ground-level occupation at T = 0",
        "sqrtZ": SQRTZ_FORMULA,
    })
    for T in cfg.temperatures:
        ts = thermal_energies(spectrum, T, units, cfg.tolerances.tail)
        if T > 0:
            oracle = fixed_point_partition(spectrum, T, units, tol=cfg.tolerances.fixed_point,
                                           max_iter=cfg.tolerances.max_iter,
                                           damping=cfg.tolerances.damping,
                                           tail_tol=cfg.tolerances.tail)
            if abs(oracle - ts.sqrt_z) > 10 * cfg.tolerances.fixed_point * ts.sqrt_z:
                raise ConsistencyError(
                    f"sqrt(Z) at T={T!r}: closed form {ts.sqrt_z!r} vs fixed point {oracle!r}")
        sqrt_z = ts.sqrt_z if T > 0 else None
        for n in range(len(ts)):
            table.append(T, n, ts.energies[n], ts.probabilities[n], sqrt_z)
    return table


def run_shift(cfg: RunConfig) -> ResultTable:
    units = cfg.unit_system()
    pairs = cfg.shift_pairs()
    if not pairs:
        raise ConfigError("need two positive temperatures or 'shift_temperatures'",
                          path="shift_temperatures")
    spectrum = solve_levels(cfg, max(max(p) for p in pairs))
    table = ResultTable("shift", ("i", "j", "T1", "T2", "nu(T1)", "nu(T2)", "delta_nu",
                                  "slope", "closed_form_delta"), provenance={
        "nu(T1)": "(E_i(T1) - E_j(T1)) / h",
        "nu(T2)": "(E_i(T2) - E_j(T2)) / h",
        "delta_nu": "nu(T1) - nu(T2) from two independent thermal solves",
        "slope": "k_B ln(g_i / g_j) / (2 h)",
        "closed_form_delta": "slope * (T1 - T2)",
    })
    for i, j in cfg.transitions:
        for T1, T2 in pairs:
            s = shift_between_temperatures(spectrum, i, j, T1, T2, units,
                                           rtol=cfg.tolerances.shift,
                                           tail_tol=cfg.tolerances.tail)
            table.append(s.i, s.j, s.T1, s.T2, s.nu_T1, s.nu_T2, s.delta_nu, s.slope,
                         s.closed_form_delta)
    return table


def evolution_setup(cfg: RunConfig):
    """Normalised components of the configured state and the thermal levels used.

    Eigenvalues come from the adaptive solve; eigenfunctions are computed
    only for the levels the state actually uses.
    """
    ev = cfg.evolution
    if ev is None:
        raise ConfigError("missing 'evolution' block", path="evolution")
    units = cfg.unit_system()
    T = ev.temperature if ev.temperature is not None else cfg.temperatures[0]
    spectrum = solve_levels(cfg, T)
    thermal = thermal_energies(spectrum, T, units, cfg.tolerances.tail)
    if ev.level is not None:
        raw = [(ev.level, 1.0 + 0.0j)]
    else:
        raw = [(c.level, complex(c.re, c.im)) for c in ev.components]
    weight = math.sqrt(math.fsum(abs(c) ** 2 for _, c in raw))
    if weight == 0:
        raise ConfigError("all coefficients are zero", path="evolution.components")
    top = max(level for level, _ in raw)
    if top >= len(spectrum):
        raise ConfigError(f"level {top} not available ({len(spectrum)} levels)",
                          path="evolution")
    # a merged cluster is represented by the eigenfunction of its lowest member
    if cfg.degeneracy.policy == "cluster":
        first_raw = np.concatenate(([0], np.cumsum(spectrum.degeneracies)))
    else:
        first_raw = np.arange(len(spectrum) + 1)
    H = _hamiltonian(cfg)
    cluster = cfg.degeneracy_policy() if cfg.degeneracy.policy == "cluster" else None
    vectors = solve_spectrum(H, int(first_raw[top]) + 1, method=cfg.solver, vectors=True,
                             policy=cluster)
    comps = []
    for level, coeff in raw:
        psi = WaveField(vectors.psi[level], vectors.grid, 0.0, T, level)
        comps.append(Component(coeff / weight, psi, float(thermal.energies[level])))
    return comps, thermal


def run_evolve(cfg: RunConfig, setup=None) -> tuple[ResultTable, ResultTable]:
    """Sampled wavefunction table plus a per-time norm summary.

    Coefficients from the config are normalised before evolving.
    """
    comps, _ = setup if setup is not None else evolution_setup(cfg)
    ev = cfg.evolution
    grid = comps[0].psi.grid
    x = grid.points
    table = ResultTable("evolve", ("t", "x", "Re psi", "Im psi", "|psi|^2"), provenance={
        "Re psi": "sum_k c_k psi_k(x) exp(-i E_k(T) t / hbar)",
    })
    norms = ResultTable("evolve_norm", ("t", "norm"), provenance={
        "norm": "sum |psi|^2 * spacing over the full grid"})
    for t in ev.time_samples():
        field = evolve_superposition(comps, t, cfg.unit_system())
        v = field.values
        for k in range(0, grid.n_points, ev.x_stride):
            table.append(t, x[k], v[k].real, v[k].imag, abs(v[k]) ** 2)
        norms.append(t, field.norm())
    return table, norms


def beat_check(cfg: RunConfig, setup=None) -> dict | None:
    """Measured density beat frequency vs. the transition frequency.

    Only defined for a superposition of two distinct levels.
    """
    comps, thermal = setup if setup is not None else evolution_setup(cfg)
    if len(comps) != 2 or comps[0].psi.level == comps[1].psi.level:
        return None
    units = cfg.unit_system()
    a, b = comps
    expected = abs(transition_frequency(thermal, a.psi.level, b.psi.level, units))
    overlap = np.abs(a.psi.values * b.psi.values)
    k = int(np.argmax(overlap))
    measured = density_beat_frequency(comps, k, t_end=20.0 / expected, samples=2000,
                                      units=units)
    return {"expected_frequency": expected, "measured_frequency": measured,
            "relative_error": abs(measured - expected) / expected}


def run_oscillator(cfg: RunConfig) -> ResultTable:
    if not isinstance(cfg.potential, HarmonicBlock):
        raise ConfigError("the oscillator tables need a harmonic potential", path="potential")
    units = cfg.unit_system()
    params = OscillatorParams(omega_osc=cfg.potential.omega, mass=cfg.potential.mass)
    table = ResultTable("oscillator", ("T", "n", "E_n(0)", "E_n(T)", "sqrtZ", "E_n(T->0+)"),
                        provenance={
        "E_n(0)": "(n + 1/2) hbar omega",
        "E_n(T)": "(n + 1)/2 hbar omega + k_B T ln(1 - exp(-hbar omega / (2 k_B T))); "
                  "E_n(0) at T = 0",
        "sqrtZ": "exp(-hbar omega / (4 k_B T)) / (1 - exp(-hbar omega / (2 k_B T)))",
        "E_n(T->0+)": "(n + 1)/2 hbar omega; differs from E_n(0) for n >= 1",
    })
    for T in cfg.temperatures:
        sqrt_z = ho_sqrt_partition(params, T, units) if T > 0 else None
        for n in range(cfg.levels):
            table.append(T, n, ho_energy_zero_T(n, params, units),
                         ho_energy_thermal(n, params, T, units), sqrt_z,
                         ho_energy_low_T_limit(n, params, units))
    return table


def run_ensemble(cfg: RunConfig) -> tuple[ResultTable, ResultTable]:
    if cfg.ensemble is None:
        raise ConfigError("missing 'ensemble' block", path="ensemble")
    units = cfg.unit_system()
    try:
        ens = EnsembleDescription(tuple(
            Microstate(s.P, tuple(ParticleTerms(pt.kin, pt.pot, pt.g, pt.p)
                                  for pt in s.particles), s.pair_energy)
            for s in cfg.ensemble.states))
    except ValueError as exc:
        raise ConfigError(str(exc), path="ensemble.states") from exc
    T = cfg.ensemble.temperature
    agg = ensemble_aggregates(ens, T, units)
    states = ResultTable("ensemble", ("state", "P", "U_state", "F_state", "S_state"),
                         provenance={
        "U_state": "sum_j (kin + pot) + pair_energy",
        "F_state": "sum_j (kin + pot + k_B T ln(g p)) + pair_energy",
        "S_state": "-k_B sum_j ln(g p)",
    })
    for k, s in enumerate(ens.states):
        states.append(k, s.P, agg.state_U[k], agg.state_F[k], agg.state_S[k])
    totals = ResultTable("ensemble_totals", ("T", "U", "F", "S", "closure_residual"),
                         provenance={
        "U": "sum_i P_i U_state", "F": "sum_i P_i F_state", "S": "sum_i P_i S_state",
        "closure_residual": "|F - (U - T S)| / max(|F|, |U|, |T S|)",
    })
    totals.append(T, agg.U, agg.F, agg.S, agg.closure_residual)
    if agg.closure_residual > cfg.tolerances.closure:
        raise ConsistencyError(f"F = U - T S violated: residual {agg.closure_residual!r}")
    return states, totals
