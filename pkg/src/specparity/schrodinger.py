"""Discretized Hamiltonian assembly and the full tridiagonal eigensolve.

Convention: H = -d2/dx2 + V(x) (hbar = 1, 2m = 1), discretized with the
second-order central difference under Dirichlet boundaries. The resulting
matrix is an unreduced Jacobi matrix: strictly negative off-diagonals, so
all eigenvalues are simple in exact arithmetic and the k-th eigenvector has
exactly k sign changes (oscillation theorem).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DegenerateSpectrumError,
    EigensolverError,
    GridMismatchError,
    TruncatedSpectrumError,
)
from .grids import Grid
from .potentials import Potential, evaluate

# Gaps at or below DEGENERACY_RTOL * max|E| are treated as numerically
# degenerate. In exact arithmetic a Jacobi matrix cannot have them, but the
# band-top modes of a reflection-symmetric Hamiltonian pair up with
# splittings far below machine precision.
DEGENERACY_RTOL = 1e-10
_GRAM_CHECK_RANK = 16
_GRAM_TOL = 1e-11
_SIGN_RTOL = 1e-8
_NODE_RTOL = 1e-9


@dataclass(frozen=True)
class HamiltonianMatrix:
    """Symmetric tridiagonal action matrix T of -d2/dx2 + V on the grid.

    diag[i] = 2/h^2 + V(x_i), offdiag[i] = -1/h^2. Stored by bands, so
    symmetry is structural rather than numerical.
    """

    grid: Grid
    diag: np.ndarray
    offdiag: np.ndarray

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def norm_max(self) -> float:
        """Entrywise max norm of T."""
        return float(max(np.abs(self.diag).max(), np.abs(self.offdiag).max()))

    def to_dense(self) -> np.ndarray:
        return (
            np.diag(self.diag)
            + np.diag(self.offdiag, 1)
            + np.diag(self.offdiag, -1)
        )

    def matvec(self, f) -> np.ndarray:
        f = np.asarray(f)
        if f.shape != (self.n,):
            raise GridMismatchError(f"vector has shape {f.shape}, expected ({self.n},)")
        out = self.diag * f
        out[:-1] = out[:-1] + self.offdiag * f[1:]
        out[1:] = out[1:] + self.offdiag * f[:-1]
        return out


@dataclass(frozen=True)
class Spectrum:
    """Eigensystem of the discretized Hamiltonian.

    energies are ascending; the columns of ``modes`` are Euclidean-
    orthonormal eigenvectors u_n with the first significant entry positive;
    ``phi`` holds the quadrature-normalized samples u_n / sqrt(h), the
    discrete version of unit-normalized eigenfunctions.
    """

    grid: Grid
    energies: np.ndarray
    modes: np.ndarray
    phi: np.ndarray

    @property
    def n_modes(self) -> int:
        return self.modes.shape[1]

    @property
    def is_full(self) -> bool:
        return self.n_modes == self.grid.n


def assemble_from_samples(values, grid: Grid) -> HamiltonianMatrix:
    """Hamiltonian from potential samples V(x_i) on the grid."""
    vals = np.asarray(values, dtype=float)
    if vals.shape != (grid.n,):
        raise GridMismatchError(f"potential samples have shape {vals.shape}, expected ({grid.n},)")
    if not np.all(np.isfinite(vals)):
        raise ValueError("potential samples must be finite")
    inv_h2 = 1.0 / (grid.h * grid.h)
    diag = 2.0 * inv_h2 + vals
    offdiag = np.full(grid.n - 1, -inv_h2)
    diag.flags.writeable = False
    offdiag.flags.writeable = False
    return HamiltonianMatrix(grid=grid, diag=diag, offdiag=offdiag)


def assemble(v: Potential, grid: Grid) -> HamiltonianMatrix:
    """Discretize -d2/dx2 + V with Dirichlet boundaries."""
    return assemble_from_samples(evaluate(v, grid.points), grid)


def _find_clusters(gaps: np.ndarray, guard: float) -> list:
    """Maximal runs of consecutive indices whose gaps are all <= guard."""
    clusters = []
    n = gaps.size + 1
    k = 0
    while k < n:
        j = k
        while j < n - 1 and gaps[j] <= guard:
            j += 1
        if j > k:
            clusters.append((k, j + 1))
        k = j + 1
    return clusters


def _adapt_reflection(hm: HamiltonianMatrix, energies: np.ndarray, modes: np.ndarray) -> np.ndarray:
    """Resolve eigenvectors against the exact reflection symmetry of T.

    When diag is exactly palindromic, T commutes exactly with the index
    reversal J, and in exact arithmetic mode k is a J-eigenvector with
    parity (-1)^k (its k sign changes pair up across the midpoint). The
    computed basis loses this in two ways: well-separated modes pick up
    O(eps*||T||/gap) admixtures, and numerically degenerate clusters come
    back as arbitrary rotations. Projecting each isolated mode onto its
    parity sector and splitting each cluster by sector restores the exact-
    arithmetic basis without changing any backward-stable quantity.

    Degenerate clusters that cannot be resolved this way (no reflection
    symmetry, or a sector count that contradicts the alternation) raise
    DegenerateSpectrumError.
    """
    n = energies.size
    gaps = np.diff(energies)
    guard = DEGENERACY_RTOL * np.abs(energies).max()
    clusters = _find_clusters(gaps, guard)
    reflective = bool(
        np.array_equal(hm.diag, hm.diag[::-1])
        and np.array_equal(hm.offdiag, hm.offdiag[::-1])
    )
    if not reflective:
        if clusters:
            k, j = clusters[0]
            raise DegenerateSpectrumError(
                f"{len(clusters)} near-degenerate cluster(s) (first at modes {k}..{j - 1}, "
                f"gap {gaps[k]:.3e} <= guard {guard:.3e}) and the Hamiltonian has no "
                f"exact reflection symmetry to resolve them"
            )
        return modes

    signs = (-1.0) ** np.arange(n)
    in_cluster = np.zeros(n, dtype=bool)
    for a, b in clusters:
        in_cluster[a:b] = True

    # Isolated modes: project onto the expected sector. The projection is a
    # near-identity here because above-guard gaps keep admixtures small.
    proj = (modes + modes[::-1, :] * signs[np.newaxis, :]) / 2.0
    norms = np.linalg.norm(proj, axis=0)
    good = ~in_cluster & (norms > 0.5)
    modes = modes.copy()
    modes[:, good] = proj[:, good] / norms[good]
    bad = np.nonzero(~in_cluster & (norms <= 0.5))[0]
    if bad.size:
        raise DegenerateSpectrumError(
            f"mode(s) {bad.tolist()} contradict the reflection-parity alternation"
        )

    for a, b in clusters:
        block = modes[:, a:b]
        idx = np.arange(a, b)
        expected = signs[a:b]
        for s in (1.0, -1.0):
            slots = idx[expected == s]
            sector = (block + s * block[::-1, :]) / 2.0
            basis, sv, _ = np.linalg.svd(sector, full_matrices=False)
            keep = basis[:, sv > 0.5]
            if keep.shape[1] != slots.size:
                raise DegenerateSpectrumError(
                    f"cluster at modes {a}..{b - 1} splits into {keep.shape[1]} "
                    f"{'even' if s > 0 else 'odd'} vector(s), expected {slots.size}"
                )
            keep = (keep + s * keep[::-1, :]) / 2.0  # re-pin exact symmetry
            keep = keep / np.linalg.norm(keep, axis=0)
            if slots.size > 1:
                # order sector members by Rayleigh quotient for determinism
                tv = hm.diag[:, np.newaxis] * keep
                tv[:-1] += hm.offdiag[:, np.newaxis] * keep[1:]
                tv[1:] += hm.offdiag[:, np.newaxis] * keep[:-1]
                keep = keep[:, np.argsort(np.einsum("ij,ij->j", keep, tv))]
            modes[:, slots] = keep
    return modes


def _fix_signs(modes: np.ndarray) -> np.ndarray:
    """First entry with magnitude above 1e-8 * max|u_n| made positive."""
    n = modes.shape[1]
    thresh = _SIGN_RTOL * np.abs(modes).max(axis=0)
    first = (np.abs(modes) > thresh[np.newaxis, :]).argmax(axis=0)
    signs = np.sign(modes[first, np.arange(n)])
    signs[signs == 0] = 1.0
    return modes * signs


def solve(hm: HamiltonianMatrix) -> Spectrum:
    """Full eigendecomposition of the tridiagonal Hamiltonian.

    All n eigenpairs are computed: downstream operator constructions need
    the complete discrete basis for their identities to hold exactly.
    """
    try:
        energies, modes = scipy.linalg.eigh_tridiagonal(
            hm.diag, hm.offdiag, lapack_driver="stemr"
        )
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigensolverError(f"tridiagonal eigensolve failed: {exc}") from exc
    if not np.all(np.isfinite(energies)) or not np.all(np.isfinite(modes)):
        raise EigensolverError("eigensolver returned non-finite values")

    modes = _adapt_reflection(hm, energies, modes)
    modes = _fix_signs(modes)

    r = min(_GRAM_CHECK_RANK, hm.n)
    gram = modes[:, :r].T @ modes[:, :r] - np.eye(r)
    if np.abs(gram).max() > _GRAM_TOL:
        raise EigensolverError(
            f"eigenvector orthonormality defect {np.abs(gram).max():.3e} exceeds {_GRAM_TOL:g}"
        )

    phi = modes / np.sqrt(hm.grid.h)
    for arr in (energies, modes, phi):
        arr.flags.writeable = False
    return Spectrum(grid=hm.grid, energies=energies, modes=modes, phi=phi)


def check_orthonormality(s: Spectrum, rank: int) -> float:
    """Max deviation of the quadrature Gram matrix from the identity."""
    if not (1 <= rank <= s.n_modes):
        raise ValueError(f"rank must be in 1..{s.n_modes}, got {rank}")
    block = s.phi[:, :rank]
    gram = s.grid.h * (block.T @ block)
    return float(np.abs(gram - np.eye(rank)).max())


def check_completeness(s: Spectrum) -> float:
    """Max deviation of sum_n u_n u_n^T from the identity.

    Equals the discrete completeness statement max |h * sum_n
    phi_n(x_i) phi_n(x_j) - delta_ij|; requires the full spectrum.
    """
    if not s.is_full:
        raise TruncatedSpectrumError(
            f"completeness needs all {s.grid.n} modes, got {s.n_modes}"
        )
    gram = s.modes @ s.modes.T
    return float(np.abs(gram - np.eye(s.grid.n)).max())


def count_nodes(s: Spectrum, k: int) -> int:
    """Strict sign changes of mode k, ignoring entries below 1e-9 * max|u_k|."""
    if not (0 <= k < s.n_modes):
        raise IndexError(f"mode index {k} out of range 0..{s.n_modes - 1}")
    u = s.modes[:, k]
    sig = u[np.abs(u) > _NODE_RTOL * np.abs(u).max()]
    return int(np.sum(sig[:-1] * sig[1:] < 0))
