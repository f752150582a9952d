"""Machine verification of the grading-operator properties.

Each check returns a non-negative residual; ``run_suite`` executes the full
pipeline (assemble, solve, build operators, all checks) and aggregates the
residuals into a report with per-check pass/fail verdicts.

Default tolerances separate two regimes: identities that are exact in exact
arithmetic on the discrete space (1e-10, hermiticity 1e-11) and the
reflection comparison between two independently computed objects (1e-6,
which inherits eigensolver conditioning).
"""
from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    GridMismatchError,
    SuiteStageError,
    TruncatedOperatorError,
    UnnormalizedStateError,
)
from .grids import Grid, require_same_grid
from .operators import (
    GradingWeights,
    OperatorKernel,
    build_parity,
    build_triparity,
    reconstruct_hamiltonian,
    reflection_action,
)
from .potentials import Potential, is_even
from .schrodinger import (
    HamiltonianMatrix,
    Spectrum,
    assemble,
    check_completeness,
    check_orthonormality,
    count_nodes,
    solve,
)
from .serial import dumps

NORM_TOL = 1e-10
GAP_WARNING_ABS = 1e-8
NODE_AUDIT_MAX = 50

DEFAULT_TOLERANCES = {
    "completeness": 1e-10,
    "conservation_gaussian": 1e-10,
    "conservation_superposition": 1e-10,
    "hamiltonian_reconstruction": 1e-8,
    "node_count": 0.0,
    "orthonormality": 1e-10,
    "parity_alternation": 1e-10,
    "parity_commutator": 1e-10,
    "parity_hermiticity": 1e-11,
    "parity_involution": 1e-10,
    "reflection_reduction": 1e-6,
    "triparity_alternation": 1e-10,
    "triparity_commutator": 1e-10,
    "triparity_cube": 1e-10,
    "triparity_nonhermiticity": 1e-10,
}


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float | None  # None when the check does not apply
    tolerance: float
    passed: bool
    seconds: float
    applicable: bool = True


@dataclass(frozen=True)
class VerificationReport:
    potential: dict
    grid: dict
    checks: tuple
    passed: bool
    warnings: tuple = ()

    def __post_init__(self):
        for c in self.checks:
            if c.residual is not None and not (c.residual >= 0 and np.isfinite(c.residual)):
                raise ValueError(f"check {c.name!r} has invalid residual {c.residual!r}")
        if self.passed != all(c.passed for c in self.checks):
            raise ValueError("overall pass must be the conjunction of per-check passes")

    def to_mapping(self, include_seconds: bool = True) -> dict:
        checks = []
        for c in self.checks:
            entry = {
                "name": c.name,
                "residual": c.residual,
                "tolerance": c.tolerance,
                "pass": c.passed,
            }
            if include_seconds:
                entry["seconds"] = c.seconds
            entry["applicable"] = c.applicable
            checks.append(entry)
        doc = {
            "potential": self.potential,
            "grid": self.grid,
            "checks": checks,
            "pass": self.passed,
        }
        if self.warnings:
            doc["warnings"] = list(self.warnings)
        return doc

    def to_json(self, include_seconds: bool = True) -> str:
        """JSON document; the ``seconds`` fields are the only unstable part."""
        return dumps(self.to_mapping(include_seconds))


def _max_abs(a: np.ndarray) -> float:
    return float(np.abs(a).max())


def check_hermiticity(k: OperatorKernel) -> float:
    """Entrywise max of A - A^dagger."""
    return _max_abs(k.action - k.action.conj().T)


def spectral_hermiticity_gap(k: OperatorKernel) -> float:
    """Spectral norm of A - A^dagger (reported for non-Hermitian gradings)."""
    anti = k.action - k.action.conj().T
    # anti-Hermitian, so the eigenvalues of anti/1j are real
    return float(np.abs(np.linalg.eigvalsh(anti / 1j)).max())


def check_commutator(k: OperatorKernel, hm: HamiltonianMatrix) -> float:
    """Relative commutator ||A T - T A||_max / ||T||_max."""
    require_same_grid(k.grid, hm.grid)
    t = hm.to_dense()
    return _max_abs(k.action @ t - t @ k.action) / hm.norm_max


def _require_full(k: OperatorKernel, what: str) -> None:
    if k.truncated:
        raise TruncatedOperatorError(
            f"{what} is an identity only for full-basis operators; "
            f"this kernel is flagged truncated"
        )


def check_involution(k: OperatorKernel) -> float:
    """||A^2 - I||_max; the discrete form of the kernel self-composition."""
    _require_full(k, "involution")
    return _max_abs(k.action @ k.action - np.eye(k.n))


def check_cube(k: OperatorKernel) -> float:
    """||A^3 - I||_max."""
    _require_full(k, "cube identity")
    a = k.action
    return _max_abs(a @ a @ a - np.eye(k.n))


def check_alternation(k: OperatorKernel, s: Spectrum, w: GradingWeights | None = None) -> float:
    """max_n ||A u_n - w_n u_n||_2 for the expected eigenvalue sequence w."""
    require_same_grid(k.grid, s.grid)
    if w is None:
        w = GradingWeights.alternating(s.n_modes)
    if len(w) != s.n_modes:
        raise GridMismatchError(f"got {len(w)} weights for {s.n_modes} modes")
    resid = k.action @ s.modes - s.modes * w.values
    return float(np.linalg.norm(resid, axis=0).max())


def check_reflection_reduction(p: OperatorKernel, v: Potential, grid: Grid):
    """||A_P - J||_max when V is even on a symmetric grid, else None.

    None is the not-applicable marker: for potentials without spatial
    reflection symmetry the parity operator legitimately differs from J.
    """
    require_same_grid(p.grid, grid)
    if not grid.symmetric or not is_even(v, grid):
        return None
    j = reflection_action(grid)
    return _max_abs(p.action - j.action)


def check_conservation(p: OperatorKernel, s: Spectrum, psi0, times) -> float:
    """Max drift of <psi(t)| A |psi(t)> under spectral time evolution.

    Evolution is exact in the discrete space (phase factors on the
    eigenbasis), so any drift is an operator property, not integrator error.
    """
    require_same_grid(p.grid, s.grid)
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (s.grid.n,):
        raise GridMismatchError(f"state has shape {psi0.shape}, expected ({s.grid.n},)")
    norm = np.linalg.norm(psi0)
    if abs(norm - 1.0) > NORM_TOL:
        raise UnnormalizedStateError(f"state norm {norm!r} differs from 1")
    coeff = s.modes.T @ psi0
    values = []
    for t in np.asarray(times, dtype=float):
        psi_t = s.modes @ (coeff * np.exp(-1j * s.energies * t))
        values.append(np.vdot(psi_t, p.action @ psi_t))
    values = np.asarray(values)
    return float(np.abs(values - values[0]).max())


def _gaussian_state(grid: Grid, center: float = 1.0, width: float = 1.0) -> np.ndarray:
    g = np.exp(-((grid.points - center) ** 2) / (2.0 * width * width))
    return g / np.linalg.norm(g)


def _stage(name: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except Exception as exc:
        raise SuiteStageError(name, exc) from exc


def run_suite(
    v: Potential,
    grid: Grid,
    tolerances: dict | None = None,
    *,
    omega_branch: int = +1,
    spectrum: Spectrum | None = None,
    conservation_times=None,
) -> VerificationReport:
    """Run the whole verification pipeline and aggregate a report.

    ``spectrum`` may be supplied to bypass the solve stage, which is how
    negative controls (deliberately corrupted bases) are driven through the
    same checks. Check order in the report is alphabetical by name.
    """
    tol = dict(DEFAULT_TOLERANCES)
    for name, value in (tolerances or {}).items():
        if name not in DEFAULT_TOLERANCES:
            raise ValueError(f"unknown check name {name!r}")
        if not (value > 0):
            raise ValueError(f"tolerance for {name!r} must be positive")
        tol[name] = float(value)
    if conservation_times is None:
        conservation_times = np.linspace(0.0, 10.0, 101)

    hm = _stage("assemble", assemble, v, grid)
    if spectrum is None:
        spectrum = _stage("solve", solve, hm)
    parity = _stage("build_parity", build_parity, spectrum)
    triparity = _stage("build_triparity", build_triparity, spectrum, omega_branch)
    recon = _stage("reconstruct_hamiltonian", reconstruct_hamiltonian, spectrum)

    def ham_reconstruction() -> float:
        return _max_abs(recon.action - hm.to_dense()) / hm.norm_max

    def node_audit() -> float:
        worst = 0
        for k in range(min(NODE_AUDIT_MAX, spectrum.n_modes - 1) + 1):
            worst = max(worst, abs(count_nodes(spectrum, k) - k))
        return float(worst)

    def nonhermiticity() -> float:
        return abs(spectral_hermiticity_gap(triparity) - np.sqrt(3.0))

    psi_super = (spectrum.modes[:, 0] + spectrum.modes[:, 1]) / np.sqrt(2.0)
    checks = [
        ("orthonormality", lambda: check_orthonormality(spectrum, spectrum.n_modes)),
        ("completeness", lambda: check_completeness(spectrum)),
        ("hamiltonian_reconstruction", ham_reconstruction),
        ("node_count", node_audit),
        ("parity_hermiticity", lambda: check_hermiticity(parity)),
        ("parity_commutator", lambda: check_commutator(parity, hm)),
        ("parity_involution", lambda: check_involution(parity)),
        ("parity_alternation", lambda: check_alternation(parity, spectrum)),
        ("triparity_commutator", lambda: check_commutator(triparity, hm)),
        ("triparity_cube", lambda: check_cube(triparity)),
        (
            "triparity_alternation",
            lambda: check_alternation(
                triparity, spectrum, GradingWeights.cube_roots(spectrum.n_modes, omega_branch)
            ),
        ),
        ("triparity_nonhermiticity", nonhermiticity),
        (
            "reflection_reduction",
            lambda: check_reflection_reduction(parity, v, grid),
        ),
        (
            "conservation_superposition",
            lambda: check_conservation(parity, spectrum, psi_super, conservation_times),
        ),
        (
            "conservation_gaussian",
            lambda: check_conservation(
                parity, spectrum, _gaussian_state(grid), conservation_times
            ),
        ),
    ]

    results = []
    for name, fn in checks:
        t0 = time.perf_counter()
        residual = _stage(name, fn)
        elapsed = time.perf_counter() - t0
        if residual is None:
            results.append(
                CheckResult(name, None, tol[name], True, elapsed, applicable=False)
            )
        else:
            residual = float(residual)
            results.append(
                CheckResult(name, residual, tol[name], residual <= tol[name], elapsed)
            )
    results.sort(key=lambda c: c.name)

    warnings = []
    min_gap = float(np.diff(spectrum.energies).min()) if spectrum.n_modes > 1 else np.inf
    if min_gap < GAP_WARNING_ABS and any(
        c.name == "reflection_reduction" and c.applicable for c in results
    ):
        warnings.append(
            f"reflection_reduction: minimum eigenvalue gap {min_gap:.3e} is below "
            f"{GAP_WARNING_ABS:g}; parity assignment in degenerate pairs relies on "
            f"the exact reflection symmetry of the discrete Hamiltonian"
        )

    return VerificationReport(
        potential=v.describe(),
        grid=grid.describe(),
        checks=tuple(results),
        passed=all(c.passed for c in results),
        warnings=tuple(warnings),
    )


def corrupt_spectrum(s: Spectrum, mode: int, eps: float = 1e-3, seed: int = 0) -> Spectrum:
    """Return a copy with Gaussian noise of size eps added to one mode.

    The corrupted mode is renormalized but no longer orthogonal to its
    neighbors, so operator identities built from the result must fail; this
    is the negative control for the verification suite.
    """
    if not (0 <= mode < s.n_modes):
        raise IndexError(f"mode index {mode} out of range 0..{s.n_modes - 1}")
    rng = np.random.default_rng(seed)
    modes = s.modes.copy()
    noisy = modes[:, mode] + eps * rng.standard_normal(s.grid.n)
    modes[:, mode] = noisy / np.linalg.norm(noisy)
    phi = modes / np.sqrt(s.grid.h)
    return replace(s, modes=modes, phi=phi)
