import math

import numpy as np
import pytest

from thermoqm import (NATURAL, Harmonic, InfiniteWell, Tabulated, UnitSystem, ZeroTemperatureError,
                      beta_of, eval_potential, make_grid)


def test_grid_on_zero_pi():
    g = make_grid(0, math.pi, 5)
    assert g.spacing == pytest.approx(math.pi / 4, rel=1e-15)
    np.testing.assert_allclose(g.points, [0, math.pi / 4, math.pi / 2, 3 * math.pi / 4, math.pi],
                               rtol=1e-15)


def test_grid_spacing_hundredth():
    assert make_grid(-10, 10, 2001).spacing == pytest.approx(0.01, rel=1e-14)


@pytest.mark.parametrize("args", [(0, 0, 10), (1, 0, 10), (0, 1, 2), (0, 1, 2.5)])
def test_grid_rejects_bad_input(args):
    with pytest.raises(ValueError):
        make_grid(*args)


def test_grid_accepts_integral_float_count():
    assert make_grid(0, 1, 11.0).n_points == 11


@pytest.mark.parametrize("a,b,n", [(0, 1, 3), (-10, 10, 2001), (1e-3, 7.7, 997), (-5e3, 1e4, 12345)])
def test_spacings_sum_to_extent(a, b, n):
    g = make_grid(a, b, n)
    assert abs(math.fsum([g.spacing] * (n - 1)) - (b - a)) <= 1e-12 * (b - a)
    assert g.points[0] == a and g.points[-1] == b


def test_units():
    assert NATURAL.h_planck == 2 * math.pi
    si = UnitSystem.si()
    assert si.h_planck == 2 * math.pi * si.hbar
    assert si.h_planck == pytest.approx(6.62607015e-34, rel=1e-12)
    with pytest.raises(ValueError):
        UnitSystem(hbar=0.0)
    with pytest.raises(ValueError):
        UnitSystem(k_B=-1.0)


def test_harmonic_potential_values():
    g = make_grid(-2, 2, 5)
    v = eval_potential(Harmonic(mass=1, omega=1), g)
    assert v[2] == 0.0
    assert v[4] == 2.0
    assert v[0] == 2.0
    assert eval_potential(Harmonic(offset=0.25), g)[2] == 0.25


def test_well_is_flat_inside():
    g = make_grid(0, 2, 21)
    v = eval_potential(InfiniteWell(2.0), g)
    assert np.all(v == 0.0)
    with pytest.raises(ValueError):
        eval_potential(InfiniteWell(3.0), g)


def test_tabulated_length_mismatch():
    g = make_grid(0, 1, 5)
    assert np.all(eval_potential(Tabulated([1, 2, 3, 4, 5]), g) == [1, 2, 3, 4, 5])
    with pytest.raises(ValueError):
        eval_potential(Tabulated([1, 2, 3]), g)
    with pytest.raises(ValueError):
        Tabulated([1, float("nan")])


@pytest.mark.parametrize("bad", [Harmonic, ])
def test_harmonic_rejects_nonpositive(bad):
    with pytest.raises(ValueError):
        bad(mass=0)
    with pytest.raises(ValueError):
        bad(omega=-1)


def test_potential_is_order_independent():
    g = make_grid(-3, 3, 31)
    v = eval_potential(Harmonic(mass=2, omega=0.7), g)
    x = g.points
    perm = np.random.default_rng(1).permutation(x.size)
    assert np.array_equal(v[perm], 0.5 * 2 * 0.7**2 * x[perm] ** 2)


def test_beta():
    assert beta_of(1.0) == 1.0
    assert beta_of(2.0) == 0.5
    assert beta_of(2.0, UnitSystem(k_B=4.0)) == 0.125
    with pytest.raises(ZeroTemperatureError):
        beta_of(0.0)
    with pytest.raises(ZeroTemperatureError):
        beta_of(-1.0)
