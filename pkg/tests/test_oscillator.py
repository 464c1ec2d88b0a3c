import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from thermoqm import (OscillatorParams, UnitSystem, adaptive_spectrum, ho_energy_thermal,
                      ho_energy_zero_T, ho_spectrum, ho_sqrt_partition, thermal_energies)
from thermoqm.oscillator import ho_energy_low_T_limit, zero_temperature_gap

P = OscillatorParams()
HO_SQRT_Z_KT1 = 1.97931758165100018     # mpmath direct sum
HO_SQRT_Z_KT05 = 0.959517375667471860
HO_E0_KT1 = -0.432752129567188572


def test_zero_T_levels():
    assert ho_energy_zero_T(0, P) == 0.5
    assert ho_energy_zero_T(3, P) == 3.5
    assert ho_energy_zero_T(0, OscillatorParams(omega_osc=2.0)) == 1.0
    assert ho_energy_zero_T(0, P, UnitSystem(hbar=2.0)) == 1.0
    for bad in (-1, 1.5):
        with pytest.raises(ValueError):
            ho_energy_zero_T(bad, P)


def test_params_validation():
    with pytest.raises(ValueError):
        OscillatorParams(omega_osc=0.0)
    with pytest.raises(ValueError):
        OscillatorParams(mass=-1.0)


def test_sqrt_partition_values():
    assert ho_sqrt_partition(P, 1.0) == pytest.approx(HO_SQRT_Z_KT1, rel=1e-14)
    assert ho_sqrt_partition(P, 0.5) == pytest.approx(HO_SQRT_Z_KT05, rel=1e-14)
    assert ho_sqrt_partition(P, 0.5) == pytest.approx(math.exp(-0.5) / (1 - math.exp(-1)),
                                                      rel=1e-15)


def test_sqrt_partition_low_T_ground_term_dominates():
    T = 0.01
    assert ho_sqrt_partition(P, T) / math.exp(-1 / (4 * T)) == pytest.approx(1.0, abs=1e-20)


def test_sqrt_partition_rejects_nonpositive_T():
    with pytest.raises(ValueError):
        ho_sqrt_partition(P, 0.0)


def test_thermal_level_value():
    assert ho_energy_thermal(0, P, 1.0) == pytest.approx(HO_E0_KT1, rel=1e-14)
    with pytest.raises(ValueError):
        ho_energy_thermal(0, P, -1.0)


def test_zero_T_route_and_low_T_limit():
    for n in range(6):
        assert ho_energy_thermal(n, P, 0.0) == ho_energy_zero_T(n, P)
        assert ho_energy_thermal(n, P, 1e-3) == pytest.approx(ho_energy_low_T_limit(n, P),
                                                              abs=1e-12)
        assert zero_temperature_gap(n, P) == n / 2
    # only the ground level is continuous at T = 0
    assert ho_energy_low_T_limit(0, P) == ho_energy_zero_T(0, P)
    assert ho_energy_low_T_limit(3, P) == 2.0


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 50), st.floats(0.05, 50.0), st.floats(0.1, 10.0))
def test_level_spacing_is_half_quantum(n, T, omega):
    p = OscillatorParams(omega_osc=omega)
    gap = ho_energy_thermal(n + 1, p, T) - ho_energy_thermal(n, p, T)
    assert gap == pytest.approx(omega / 2, rel=1e-12, abs=1e-12 * abs(ho_energy_thermal(n + 1, p, T)))


@pytest.mark.parametrize("T", [0.2, 0.5, 1.0, 2.0])
def test_pipeline_on_exact_levels(T):
    spectrum = ho_spectrum(P, 200)
    th = thermal_energies(spectrum, T)
    for n in range(6):
        assert th.energies[n] == pytest.approx(ho_energy_thermal(n, P, T), rel=1e-10)
    assert th.sqrt_z == pytest.approx(ho_sqrt_partition(P, T), rel=1e-12)


@pytest.mark.parametrize("T", [0.2, 0.5, 1.0, 1.5])
def test_finite_difference_chain(ho_hamiltonian, T):
    # 2001 points; kT = 2 needs a finer grid, covered by the acceptance suite
    s = adaptive_spectrum(ho_hamiltonian, T, k_min=40)
    th = thermal_energies(s, T)
    for n in range(6):
        exact = ho_energy_thermal(n, P, T)
        assert abs(th.energies[n] - exact) <= 1e-3 * abs(exact)


def test_spectrum_is_truncated():
    s = ho_spectrum(P, 5)
    assert s.truncated
    np.testing.assert_array_equal(s.energies, [0.5, 1.5, 2.5, 3.5, 4.5])
    with pytest.raises(ValueError):
        ho_spectrum(P, 0)
