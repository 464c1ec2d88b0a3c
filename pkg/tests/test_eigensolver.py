import math
import time

import numpy as np
import pytest

from thermoqm import (ClusterDegeneracy, ExplicitDegeneracy, ALL_ONES, ZeroTSpectrum,
                      assign_degeneracies, discretize_hamiltonian, make_grid,
                      solve_spectrum, UnitSystem)
from thermoqm.eigensolver import (bisect_eigenvalues, eigen_residuals, inverse_iteration,
                                  sturm_count)


def test_stencil_free_particle_unit_spacing():
    g = make_grid(0, 6, 7)
    H = discretize_hamiltonian(np.zeros(7), g)
    assert np.all(H.diagonal == 1.0)
    assert np.all(H.off_diagonal == -0.5)
    assert H.size == 5 and H.off_diagonal.size == 4


def test_stencil_harmonic_centre(ho_grid, ho_hamiltonian):
    centre = ho_grid.n_points // 2 - 1  # interior index of x = 0
    assert ho_grid.points[centre + 1] == 0.0
    assert ho_hamiltonian.diagonal[centre] == pytest.approx(1 / ho_grid.spacing**2, rel=1e-15)


def test_stencil_units_and_mass():
    g = make_grid(0, 1, 11)
    H = discretize_hamiltonian(np.zeros(11), g, mass=2.0, units=UnitSystem(hbar=3.0))
    assert H.off_diagonal[0] == pytest.approx(-9.0 / (2 * 2.0 * 0.01))


def test_stencil_rejects_bad_input():
    g = make_grid(0, 1, 11)
    with pytest.raises(ValueError):
        discretize_hamiltonian(np.zeros(10), g)
    with pytest.raises(ValueError):
        discretize_hamiltonian(np.zeros(11), g, mass=0.0)


def test_box_ground_state(box_hamiltonian):
    s = solve_spectrum(box_hamiltonian, 5)
    assert abs(s.energies[0] - 0.5) / 0.5 <= 1e-5
    # closed-form eigenvalues of the discrete operator itself
    h = box_hamiltonian.grid.spacing
    n = np.arange(1, 6)
    np.testing.assert_allclose(s.energies, (1 - np.cos(n * h)) / h**2, rtol=1e-10)


def test_harmonic_ground_state(ho_levels):
    assert abs(ho_levels.energies[0] - 0.5) <= 1e-3


def test_k_out_of_range(ho_hamiltonian):
    with pytest.raises(ValueError):
        solve_spectrum(ho_hamiltonian, 0)
    with pytest.raises(ValueError):
        solve_spectrum(ho_hamiltonian, ho_hamiltonian.size + 1)


def test_residual_orthogonality_normalisation(ho_hamiltonian, ho_levels):
    assert eigen_residuals(ho_hamiltonian, ho_levels).max() <= 1e-8
    h = ho_levels.grid.spacing
    gram = ho_levels.psi @ ho_levels.psi.T * h
    off = gram - np.diag(np.diag(gram))
    assert np.abs(off).max() <= 1e-8
    assert np.abs(np.diag(gram) - 1).max() <= 1e-10
    assert np.all(ho_levels.psi[:, 0] == 0) and np.all(ho_levels.psi[:, -1] == 0)


def test_sign_convention(ho_levels):
    for row in ho_levels.psi:
        significant = np.flatnonzero(np.abs(row) > 1e-8 * np.abs(row).max())
        assert row[significant[0]] > 0


def test_second_order_convergence():
    ratios = []
    for n in (1, 2, 3):
        errs = []
        for pts in (201, 401):
            g = make_grid(0, math.pi, pts)
            H = discretize_hamiltonian(np.zeros(pts), g)
            e = solve_spectrum(H, 3, vectors=False).energies[n - 1]
            errs.append(abs(e - n * n / 2))
        ratios.append(errs[0] / errs[1])
    for r in ratios:
        assert 3.5 <= r <= 4.5


@pytest.mark.parametrize("pts", [5, 37, 200])
def test_matches_dense_oracle(pts, rng):
    g = make_grid(-3, 4, pts)
    V = rng.uniform(-2, 5, pts)
    H = discretize_hamiltonian(V, g)
    K = H.size
    s = solve_spectrum(H, K)
    dense = np.linalg.eigvalsh(H.dense())
    np.testing.assert_allclose(s.energies, dense, rtol=1e-9, atol=1e-9 * np.abs(dense).max())
    assert eigen_residuals(H, s).max() <= 1e-8


def test_lapack_route_agrees(ho_hamiltonian, ho_levels):
    alt = solve_spectrum(ho_hamiltonian, 40, method="lapack")
    np.testing.assert_allclose(alt.energies, ho_levels.energies, rtol=1e-10)
    np.testing.assert_allclose(alt.psi, ho_levels.psi, atol=1e-8)
    with pytest.raises(ValueError):
        solve_spectrum(ho_hamiltonian, 3, method="qr")


def test_sturm_count_small_matrix():
    d = np.array([2.0, 2.0, 2.0])
    e = np.array([-1.0, -1.0])
    # eigenvalues 2 - sqrt(2), 2, 2 + sqrt(2)
    assert sturm_count(d, e, [0.0, 1.0, 2.0 - 1e-12, 2.0 + 1e-12, 4.0]).tolist() == [0, 1, 1, 2, 3]
    np.testing.assert_allclose(bisect_eigenvalues(d, e, 3),
                               [2 - math.sqrt(2), 2, 2 + math.sqrt(2)], rtol=1e-15, atol=4e-16)


def test_inverse_iteration_on_known_vectors():
    d = np.array([2.0, 2.0, 2.0])
    e = np.array([-1.0, -1.0])
    vals = bisect_eigenvalues(d, e, 3)
    vecs = inverse_iteration(d, e, vals)
    dense = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    np.testing.assert_allclose(dense @ vecs, vecs * vals, atol=1e-14)
    np.testing.assert_allclose(vecs.T @ vecs, np.eye(3), atol=1e-14)


def test_sturm_solver_is_deterministic(ho_hamiltonian):
    a = solve_spectrum(ho_hamiltonian, 12)
    b = solve_spectrum(ho_hamiltonian, 12)
    assert np.array_equal(a.energies, b.energies)
    assert np.array_equal(a.psi, b.psi)
    # eigenvalues do not depend on how many are requested
    c = solve_spectrum(ho_hamiltonian, 5, vectors=False)
    assert np.array_equal(c.energies, a.energies[:5])


def test_truncation_flag(box_hamiltonian):
    assert solve_spectrum(box_hamiltonian, 3, vectors=False).truncated
    g = make_grid(0, 1, 6)
    H = discretize_hamiltonian(np.zeros(6), g)
    assert not solve_spectrum(H, 4).truncated


# -- degeneracy policies ---------------------------------------------------

def test_explicit_table():
    s = ZeroTSpectrum.from_levels([-0.5, -0.125, -0.0556])
    assert assign_degeneracies(s, ExplicitDegeneracy((1, 4, 9))).degeneracies.tolist() == [1, 4, 9]
    with pytest.raises(ValueError):
        assign_degeneracies(s, ExplicitDegeneracy((1, 4)))
    with pytest.raises(ValueError):
        assign_degeneracies(s, ExplicitDegeneracy((1, 2.5, 3)))
    with pytest.raises(ValueError):
        assign_degeneracies(s, ExplicitDegeneracy((1, 0, 3)))


def test_cluster_merges_near_degenerate():
    s = ZeroTSpectrum.from_levels([1.0, 1.0 + 1e-9, 2.0])
    merged = assign_degeneracies(s, ClusterDegeneracy(1e-6))
    assert merged.degeneracies.tolist() == [2, 1]
    np.testing.assert_allclose(merged.energies, [1.0 + 0.5e-9, 2.0], rtol=1e-15)
    with pytest.raises(ValueError):
        ClusterDegeneracy(0.0)


def test_cluster_keeps_representative_eigenfunction():
    # two decoupled identical wells give exactly paired levels
    g = make_grid(-6, 6, 601)
    x = g.points
    V = np.where(np.abs(np.abs(x) - 3) < 1.5, 0.0, 200.0)
    H = discretize_hamiltonian(V, g)
    with pytest.raises(ValueError, match="exactly degenerate"):
        solve_spectrum(H, 4)
    merged = solve_spectrum(H, 4, policy=ClusterDegeneracy(1e-6))
    assert merged.degeneracies.tolist() == [2, 2]
    assert eigen_residuals(H, merged).max() <= 1e-8
    assert merged.energies[1] > merged.energies[0]


def test_policy_applied_inside_solver(box_hamiltonian):
    s = solve_spectrum(box_hamiltonian, 3, vectors=False, policy=ExplicitDegeneracy((1, 4, 9)))
    assert s.degeneracies.tolist() == [1, 4, 9]


def test_all_ones():
    s = ZeroTSpectrum.from_levels([0, 1, 2], [3, 1, 2])
    assert assign_degeneracies(s, ALL_ONES).degeneracies.tolist() == [1, 1, 1]


def test_spectrum_invariants():
    with pytest.raises(ValueError):
        ZeroTSpectrum.from_levels([1.0, 1.0])
    with pytest.raises(ValueError):
        ZeroTSpectrum.from_levels([1.0, 0.0])
    with pytest.raises(ValueError):
        ZeroTSpectrum.from_levels([])
    with pytest.raises(ValueError):
        ZeroTSpectrum.from_levels([0, 1], [1, 0])


def test_solve_timing(ho_hamiltonian):
    start = time.perf_counter()
    solve_spectrum(ho_hamiltonian, 6)
    assert time.perf_counter() - start < 5.0
