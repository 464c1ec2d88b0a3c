"""Bound states of a 1D Hamiltonian on a uniform grid.

The kinetic operator is the three-point central difference, the grid end
points are hard walls (psi = 0 there), so the unknowns are the
``n_points - 2`` interior values.  The resulting real symmetric
tridiagonal matrix is diagonalised by Sturm-sequence bisection for the
eigenvalues and shifted inverse iteration for the eigenvectors.  The
bisection uses only elementwise IEEE arithmetic, so eigenvalues are
bit-reproducible across BLAS/LAPACK builds.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy import linalg

from .core import NATURAL, Grid1D, UnitSystem
from .errors import ConvergenceError

_EPS = np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class TridiagonalHamiltonian:
    """Interior block of the finite-difference Hamiltonian.

    ``diagonal`` has ``grid.n_points - 2`` entries and ``off_diagonal`` one
    fewer; the matrix is symmetric by construction.
    """

    diagonal: np.ndarray
    off_diagonal: np.ndarray
    grid: Grid1D
    mass: float

    @property
    def size(self) -> int:
        return self.diagonal.shape[0]

    def matvec(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v)
        out = self.diagonal * v
        out[:-1] += self.off_diagonal * v[1:]
        out[1:] += self.off_diagonal * v[:-1]
        return out

    def dense(self) -> np.ndarray:
        return (np.diag(self.diagonal) + np.diag(self.off_diagonal, 1)
                + np.diag(self.off_diagonal, -1))

    def gershgorin(self) -> tuple[float, float]:
        radius = np.zeros_like(self.diagonal)
        radius[:-1] += np.abs(self.off_diagonal)
        radius[1:] += np.abs(self.off_diagonal)
        return float(np.min(self.diagonal - radius)), float(np.max(self.diagonal + radius))

    def norm(self) -> float:
        lo, hi = self.gershgorin()
        return max(abs(lo), abs(hi))


def discretize_hamiltonian(potential, grid: Grid1D, mass: float | None = None,
                           units: UnitSystem = NATURAL) -> TridiagonalHamiltonian:
    """Build -hbar^2/(2m) d^2/dx^2 + V on the interior of ``grid``.

    ``potential`` holds one value per grid point; the two end values are
    ignored because the wavefunction is pinned to zero there.
    """
    v = np.asarray(potential, dtype=float)
    if v.ndim != 1 or v.shape[0] != grid.n_points:
        raise ValueError(
            f"potential has shape {v.shape}, expected ({grid.n_points},)")
    if not np.all(np.isfinite(v)):
        raise ValueError("potential contains non-finite values")
    mass = units.mass_default if mass is None else mass
    if not mass > 0:
        raise ValueError(f"mass must be > 0, got {mass!r}")
    kinetic = units.hbar**2 / (mass * grid.spacing**2)
    diagonal = kinetic + v[1:-1]
    off = np.full(grid.n_points - 3, -0.5 * kinetic)
    diagonal.setflags(write=False)
    off.setflags(write=False)
    return TridiagonalHamiltonian(diagonal, off, grid, float(mass))


@dataclass(frozen=True, eq=False)
class ZeroTSpectrum:
    """Lowest levels of the zero-temperature problem.

    Attributes
    ----------
    energies : ndarray
        Level energies E_i(0), strictly ascending.
    degeneracies : ndarray of int
        Degeneracy g_i >= 1 of each level.
    psi : ndarray or None
        One eigenfunction per level on the full grid (end points zero),
        normalised so that ``sum(psi**2) * spacing == 1``.  For a level
        produced by merging a numerical cluster this is the eigenfunction
        of the lowest member.
    grid : Grid1D or None
    truncated : bool
        True when the list is the bottom of an infinite (or longer)
        spectrum.  Partition sums over a truncated spectrum must pass the
        tail bound; a complete spectrum is a genuine finite-level system.
    """

    energies: np.ndarray
    degeneracies: np.ndarray
    psi: np.ndarray | None = field(default=None, repr=False)
    grid: Grid1D | None = None
    truncated: bool = False

    def __post_init__(self):
        e = np.array(self.energies, dtype=float, ndmin=1)
        g_raw = np.array(self.degeneracies, ndmin=1)
        if e.ndim != 1 or e.size == 0:
            raise ValueError("spectrum needs at least one level")
        if g_raw.shape != e.shape:
            raise ValueError(
                f"{g_raw.size} degeneracies for {e.size} levels")
        if not np.all(np.isfinite(e)):
            raise ValueError("non-finite level energy")
        if np.any(np.diff(e) <= 0):
            raise ValueError("level energies must be strictly ascending")
        g = _as_degeneracies(g_raw)
        e.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "degeneracies", g)
        if self.psi is not None:
            psi = np.asarray(self.psi, dtype=float)
            if self.grid is None or psi.shape != (e.size, self.grid.n_points):
                raise ValueError("psi must have shape (levels, grid.n_points)")
            norms = np.sum(psi**2, axis=1) * self.grid.spacing
            if np.any(np.abs(norms - 1.0) > 1e-10):
                raise ValueError("eigenfunctions are not normalised")
            psi.setflags(write=False)
            object.__setattr__(self, "psi", psi)

    def __len__(self) -> int:
        return self.energies.size

    @classmethod
    def from_levels(cls, energies: Sequence[float], degeneracies: Sequence[int] | None = None,
                    truncated: bool = False) -> "ZeroTSpectrum":
        energies = np.asarray(energies, dtype=float)
        if degeneracies is None:
            degeneracies = np.ones(energies.shape, dtype=int)
        return cls(energies, degeneracies, truncated=truncated)


def _as_degeneracies(values) -> np.ndarray:
    values = np.asarray(values)
    if values.dtype == bool:
        raise ValueError("degeneracies must be integers")
    as_float = values.astype(float)
    if not np.all(np.isfinite(as_float)) or np.any(as_float != np.round(as_float)):
        raise ValueError(f"degeneracies must be integers, got {values.tolist()}")
    if np.any(as_float < 1):
        raise ValueError(f"degeneracies must be >= 1, got {values.tolist()}")
    return as_float.astype(np.int64)


# -- eigenvalues -----------------------------------------------------------

def sturm_count(diagonal: np.ndarray, off_diagonal: np.ndarray, x) -> np.ndarray:
    """Number of eigenvalues strictly below each shift in ``x``.

    A zero pivot propagates as -inf through the recurrence (IEEE
    semantics), which counts it as negative, exactly as a -0 pivot would.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    e2 = (off_diagonal.astype(float) ** 2).tolist()
    shifted = diagonal[:, None] - x[None, :]
    negative = np.empty(shifted.shape, dtype=bool)
    q = shifted[0].copy()
    np.less(q, 0, out=negative[0])
    with np.errstate(divide="ignore", invalid="ignore"):
        for k in range(1, shifted.shape[0]):
            if e2[k - 1] == 0.0:
                q = shifted[k].copy()
            else:
                q = shifted[k] - e2[k - 1] / q
            np.less(q, 0, out=negative[k])
    return negative.sum(axis=0)


def bisect_eigenvalues(diagonal: np.ndarray, off_diagonal: np.ndarray, k: int,
                       max_iter: int = 200) -> np.ndarray:
    """The ``k`` smallest eigenvalues, ascending, by simultaneous bisection."""
    n = diagonal.shape[0]
    radius = np.zeros(n)
    radius[:-1] += np.abs(off_diagonal)
    radius[1:] += np.abs(off_diagonal)
    g_lo = float(np.min(diagonal - radius))
    g_hi = float(np.max(diagonal + radius))
    width = max(g_hi - g_lo, np.finfo(float).tiny)
    g_lo -= 2 * _EPS * width + np.finfo(float).tiny
    g_hi += 2 * _EPS * width + np.finfo(float).tiny
    index = np.arange(k)
    lo = np.full(k, g_lo)
    hi = np.full(k, g_hi)
    abstol = 2 * _EPS * max(abs(g_lo), abs(g_hi))
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        active = (hi - lo > abstol) & (mid > lo) & (mid < hi)
        if not np.any(active):
            return 0.5 * (lo + hi)
        count = sturm_count(diagonal, off_diagonal, mid[active])
        below = count > index[active]
        sub_lo, sub_hi = lo[active], hi[active]
        sub_hi[below] = mid[active][below]
        sub_lo[~below] = mid[active][~below]
        lo[active], hi[active] = sub_lo, sub_hi
    raise ConvergenceError(f"bisection did not converge in {max_iter} steps",
                           iterations=max_iter, iterates=(lo, hi))


# -- eigenvectors ----------------------------------------------------------

def inverse_iteration(diagonal: np.ndarray, off_diagonal: np.ndarray,
                      eigenvalues: np.ndarray, max_iter: int = 10,
                      tol: float | None = None) -> np.ndarray:
    """Unit 2-norm eigenvectors (as columns) for the given eigenvalues.

    Vectors whose eigenvalues lie within 1e-3 * ||T|| of each other are
    kept orthogonal by Gram-Schmidt inside the iteration.
    """
    n = diagonal.shape[0]
    scale = max(float(np.max(np.abs(diagonal))), float(np.max(np.abs(off_diagonal), initial=0.0)))
    norm_t = scale + 2 * float(np.max(np.abs(off_diagonal), initial=0.0))
    tol = 10 * n * _EPS * norm_t if tol is None else tol
    cluster_gap = 1e-3 * norm_t
    vectors = np.empty((n, eigenvalues.size))
    ab = np.zeros((3, n))
    ab[0, 1:] = off_diagonal
    ab[2, :-1] = off_diagonal
    for col, lam in enumerate(eigenvalues):
        rng = np.random.default_rng(7919 + col)
        x = rng.uniform(-1.0, 1.0, n)
        x /= np.linalg.norm(x)
        first = col
        while first > 0 and eigenvalues[col] - eigenvalues[first - 1] <= cluster_gap:
            first -= 1
        shift = lam
        for it in range(1, max_iter + 1):
            ab[1] = diagonal - shift
            try:
                y = linalg.solve_banded((1, 1), ab, x, check_finite=False)
            except linalg.LinAlgError:
                shift = lam + _EPS * norm_t * it
                continue
            if first < col:
                prev = vectors[:, first:col]
                y -= prev @ (prev.T @ y)
                y -= prev @ (prev.T @ y)
            x = y / np.linalg.norm(y)
            resid = diagonal * x - lam * x
            resid[:-1] += off_diagonal * x[1:]
            resid[1:] += off_diagonal * x[:-1]
            if it >= 2 and np.linalg.norm(resid) <= tol:
                break
        else:
            raise ConvergenceError(
                f"inverse iteration for eigenvalue #{col} ({lam!r}) did not reach "
                f"residual {tol:.3g} within {max_iter} iterations",
                iterations=max_iter)
        vectors[:, col] = x
    return vectors


def solve_spectrum(H: TridiagonalHamiltonian, K: int, method: str = "sturm",
                   vectors: bool = True, max_iter: int = 10,
                   policy: "DegeneracyPolicy | None" = None) -> ZeroTSpectrum:
    """The ``K`` lowest eigenpairs of ``H``.

    ``method`` is ``"sturm"`` (bisection + inverse iteration, the default)
    or ``"lapack"`` (``scipy.linalg.eigh_tridiagonal``).  Eigenfunctions
    are returned on the full grid, normalised on the grid measure, with
    the first significant component positive.

    ``policy`` is applied before the spectrum is built (default: every
    degeneracy 1).  Bit-identical eigenvalues can only be stored through
    a ``ClusterDegeneracy`` policy, which merges them.
    """
    n = H.size
    if int(K) != K or not 1 <= K <= n:
        raise ValueError(f"K must be an integer in [1, {n}], got {K!r}")
    K = int(K)
    if method == "sturm":
        evals = bisect_eigenvalues(H.diagonal, H.off_diagonal, K)
        evecs = (inverse_iteration(H.diagonal, H.off_diagonal, evals, max_iter=max_iter)
                 if vectors else None)
    elif method == "lapack":
        try:
            if vectors:
                evals, evecs = linalg.eigh_tridiagonal(
                    H.diagonal, H.off_diagonal, select="i", select_range=(0, K - 1))
            else:
                evals = linalg.eigh_tridiagonal(
                    H.diagonal, H.off_diagonal, eigvals_only=True,
                    select="i", select_range=(0, K - 1))
                evecs = None
        except linalg.LinAlgError as exc:
            raise ConvergenceError(f"LAPACK tridiagonal solver failed: {exc}") from exc
    else:
        raise ValueError(f"unknown method {method!r}")

    psi = None
    if evecs is not None:
        grid = H.grid
        psi = np.zeros((K, grid.n_points))
        psi[:, 1:-1] = evecs.T / np.sqrt(grid.spacing)
        for row in psi:
            _fix_sign(row)
    evals = np.asarray(evals, dtype=float)
    g = np.ones(K, dtype=np.int64)
    if isinstance(policy, ClusterDegeneracy):
        evals, g, psi = _merge_clusters(evals, g, psi, policy.tolerance)
    elif np.any(np.diff(evals) <= 0):
        k = int(np.flatnonzero(np.diff(evals) <= 0)[0])
        raise ValueError(f"levels {k} and {k + 1} are exactly degenerate; "
                         "solve with a ClusterDegeneracy policy")
    out = ZeroTSpectrum(evals, g, psi=psi, grid=H.grid, truncated=K < n)
    if policy is not None and not isinstance(policy, ClusterDegeneracy):
        out = assign_degeneracies(out, policy)
    return out


def _fix_sign(row: np.ndarray) -> None:
    # components below 1e-8 of the peak are roundoff-dominated in the tails
    significant = np.flatnonzero(np.abs(row) > 1e-8 * np.max(np.abs(row)))
    if significant.size and row[significant[0]] < 0:
        row *= -1.0


def eigen_residuals(H: TridiagonalHamiltonian, spectrum: ZeroTSpectrum) -> np.ndarray:
    """||H psi - E psi|| / ||H psi|| for every stored level."""
    if spectrum.psi is None:
        raise ValueError("spectrum carries no eigenfunctions")
    out = np.empty(len(spectrum))
    for i, (energy, row) in enumerate(zip(spectrum.energies, spectrum.psi)):
        v = row[1:-1]
        hv = H.matvec(v)
        out[i] = np.linalg.norm(hv - energy * v) / np.linalg.norm(hv)
    return out


# -- degeneracies ----------------------------------------------------------

@dataclass(frozen=True)
class AllOnes:
    pass


@dataclass(frozen=True)
class ExplicitDegeneracy:
    table: tuple

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(self.table))


@dataclass(frozen=True)
class ClusterDegeneracy:
    tolerance: float

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError(f"cluster tolerance must be > 0, got {self.tolerance!r}")


ALL_ONES = AllOnes()
DegeneracyPolicy = AllOnes | ExplicitDegeneracy | ClusterDegeneracy


def assign_degeneracies(spectrum: ZeroTSpectrum,
                        policy: DegeneracyPolicy = ALL_ONES) -> ZeroTSpectrum:
    """Attach degeneracies to a solved spectrum.

    ``ClusterDegeneracy`` merges runs of levels whose consecutive gaps are
    within the tolerance; the merged level sits at the mean energy and its
    degeneracy is the multiplicity.
    """
    if isinstance(policy, AllOnes):
        return replace(spectrum, degeneracies=np.ones(len(spectrum), dtype=np.int64))
    if isinstance(policy, ExplicitDegeneracy):
        if len(policy.table) != len(spectrum):
            raise ValueError(
                f"degeneracy table has {len(policy.table)} entries for "
                f"{len(spectrum)} levels")
        return replace(spectrum, degeneracies=_as_degeneracies(list(policy.table)))
    if isinstance(policy, ClusterDegeneracy):
        e, g, psi = _merge_clusters(spectrum.energies, spectrum.degeneracies, spectrum.psi,
                                    policy.tolerance)
        return ZeroTSpectrum(e, g, psi=psi, grid=spectrum.grid, truncated=spectrum.truncated)
    raise TypeError(f"unknown degeneracy policy {policy!r}")


def _merge_clusters(e, g, psi, tolerance):
    groups = [[0]]
    for k in range(1, e.size):
        if e[k] - e[k - 1] <= tolerance:
            groups[-1].append(k)
        else:
            groups.append([k])
    merged_e = np.array([np.mean(e[grp]) for grp in groups])
    merged_g = np.array([int(np.sum(g[grp])) for grp in groups], dtype=np.int64)
    if psi is not None:
        psi = psi[[grp[0] for grp in groups]]
    return merged_e, merged_g, psi
