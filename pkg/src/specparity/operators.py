"""Spectral grading operators built from a computed eigenbasis.

Every constructor here forms an action matrix A = sum_n w_n u_n u_n^T from
unimodular weights w_n: the alternating weights (-1)^n give the parity
operator, cube-root-of-unity weights give the triparity operator, and
e^{-i E_n t} gives the unitary evolution operator. The energy-weighted sum
reconstructs the Hamiltonian itself.

Action matrices act on sample vectors; the corresponding continuum-style
kernel is K(x_i, x_j) = A[i, j] / h, so that h-weighted quadrature over the
kernel reproduces the matrix action. That conversion lives here and nowhere
else, which keeps stray h factors out of the operator identities.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AsymmetricGridError,
    GridMismatchError,
    NonUnimodularWeightError,
    TruncatedSpectrumError,
)
from .grids import Grid, require_same_grid
from .schrodinger import Spectrum
from .serial import fmt_value

UNIT_MODULUS_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class OperatorKernel:
    """Dense action matrix of a coordinate-space operator on one grid.

    ``truncated`` marks operators built from fewer modes than the full
    basis; identity checks refuse those, since a partial dyad sum squares
    to a projector rather than the identity.
    """

    grid: Grid
    action: np.ndarray
    truncated: bool = False

    def __post_init__(self):
        if self.action.shape != (self.grid.n, self.grid.n):
            raise GridMismatchError(
                f"action has shape {self.action.shape}, expected ({self.grid.n}, {self.grid.n})"
            )
        if not np.all(np.isfinite(self.action)):
            raise ValueError("operator action must be finite")

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def kernel(self) -> np.ndarray:
        """Continuum-style kernel values K(x_i, x_j) = action / h."""
        return self.action / self.grid.h


@dataclass(frozen=True)
class GradingWeights:
    """Unit-modulus weight per mode index; defines a grading operator."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.atleast_1d(np.asarray(self.values))
        if vals.ndim != 1 or vals.size == 0:
            raise NonUnimodularWeightError("weights must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(vals)):
            raise NonUnimodularWeightError("weights must be finite")
        defect = np.abs(np.abs(vals) - 1.0).max()
        if defect > UNIT_MODULUS_TOL:
            raise NonUnimodularWeightError(
                f"weights deviate from unit modulus by {defect:.3e}"
            )
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.values.size

    def __mul__(self, other: "GradingWeights") -> "GradingWeights":
        if not isinstance(other, GradingWeights):
            return NotImplemented
        if len(self) != len(other):
            raise NonUnimodularWeightError("weight sequences differ in length")
        return GradingWeights(self.values * other.values)

    @classmethod
    def identity(cls, m: int) -> "GradingWeights":
        return cls(np.ones(m))

    @classmethod
    def alternating(cls, m: int) -> "GradingWeights":
        """(-1)^n, the parity grading."""
        return cls((-1.0) ** np.arange(m))

    @classmethod
    def cube_roots(cls, m: int, branch: int = +1) -> "GradingWeights":
        """omega^n with omega = e^{branch * 2 pi i / 3}.

        Computed from n mod 3 so the weights repeat exactly instead of
        accumulating phase error over the mode index.
        """
        if branch not in (+1, -1):
            raise NonUnimodularWeightError(f"branch must be +1 or -1, got {branch!r}")
        return cls(np.exp(1j * branch * (2.0 * np.pi / 3.0) * (np.arange(m) % 3)))

    @classmethod
    def evolution(cls, energies, t: float) -> "GradingWeights":
        """e^{-i E_n t}, the spectral time-evolution grading."""
        return cls(np.exp(-1j * np.asarray(energies) * float(t)))


def _mode_block(s: Spectrum, truncate: int | None) -> np.ndarray:
    if truncate is None:
        if not s.is_full:
            raise TruncatedSpectrumError(
                f"construction needs all {s.grid.n} modes, got {s.n_modes}"
            )
        return s.modes
    if not (1 <= truncate <= s.n_modes):
        raise TruncatedSpectrumError(
            f"truncation {truncate} out of range 1..{s.n_modes}"
        )
    return s.modes[:, :truncate]


def build_graded(s: Spectrum, w, truncate: int | None = None) -> OperatorKernel:
    """Grading operator A = sum_n w_n u_n u_n^T for unimodular weights."""
    if not isinstance(w, GradingWeights):
        w = GradingWeights(np.asarray(w))
    block = _mode_block(s, truncate)
    if len(w) != block.shape[1]:
        raise NonUnimodularWeightError(
            f"got {len(w)} weights for {block.shape[1]} modes"
        )
    action = (block * w.values) @ block.T
    return OperatorKernel(grid=s.grid, action=action, truncated=truncate is not None)


def build_parity(s: Spectrum, truncate: int | None = None) -> OperatorKernel:
    """Parity operator: alternating grading over the eigenbasis.

    Real symmetric, squares to the identity, commutes with the Hamiltonian,
    and has u_n as eigenvector with eigenvalue (-1)^n. Coincides with
    spatial reflection exactly when the potential is even.
    """
    m = s.n_modes if truncate is None else truncate
    return build_graded(s, GradingWeights.alternating(m), truncate)


def build_triparity(s: Spectrum, branch: int = +1, truncate: int | None = None) -> OperatorKernel:
    """Triparity operator: cube-root-of-unity grading. Unitary, not Hermitian."""
    m = s.n_modes if truncate is None else truncate
    return build_graded(s, GradingWeights.cube_roots(m, branch), truncate)


def reconstruct_hamiltonian(s: Spectrum) -> OperatorKernel:
    """Energy-weighted dyad sum; must reproduce the assembled tridiagonal."""
    block = _mode_block(s, None)
    action = (block * s.energies) @ block.T
    return OperatorKernel(grid=s.grid, action=action)


def reflection_action(grid: Grid) -> OperatorKernel:
    """Spatial reflection x -> -x as the anti-identity permutation."""
    if not grid.symmetric:
        raise AsymmetricGridError(
            "reflection maps grid points outside an asymmetric grid"
        )
    return OperatorKernel(grid=grid, action=np.eye(grid.n)[::-1].copy())


def apply(k: OperatorKernel, f) -> np.ndarray:
    """Action A f; realizes the h-weighted kernel quadrature on samples."""
    vec = np.asarray(f)
    if vec.shape != (k.n,):
        raise GridMismatchError(f"vector has shape {vec.shape}, expected ({k.n},)")
    return k.action @ vec


def compose(a: OperatorKernel, b: OperatorKernel) -> OperatorKernel:
    """Operator product (matrix product of actions)."""
    require_same_grid(a.grid, b.grid)
    return OperatorKernel(
        grid=a.grid, action=a.action @ b.action, truncated=a.truncated or b.truncated
    )


def adjoint(k: OperatorKernel) -> OperatorKernel:
    """Conjugate transpose of the action."""
    return OperatorKernel(
        grid=k.grid,
        action=np.ascontiguousarray(k.action.conj().T),
        truncated=k.truncated,
    )


def write_kernel_csv(k: OperatorKernel, path) -> None:
    """Kernel values K(x_i, x_j) as CSV with a header row of grid points."""
    kern = k.kernel
    with open(path, "w", encoding="ascii") as fh:
        fh.write(",".join(fmt_value(x) for x in k.grid.points) + "\n")
        for row in kern:
            fh.write(",".join(fmt_value(z) for z in row) + "\n")


def write_kernel_txt(k: OperatorKernel, path) -> None:
    """Plain textual dump, one kernel row per line, for regression baselines."""
    kern = k.kernel
    with open(path, "w", encoding="ascii") as fh:
        for row in kern:
            fh.write(" ".join(fmt_value(z) for z in row) + "\n")
