"""Spectral parity toolkit for 1D Schrodinger Hamiltonians.

Solves H = -d2/dx2 + V(x) on a truncated Dirichlet grid, builds grading
operators (parity, triparity, arbitrary unimodular gradings) from the
computed eigenbasis, and machine-verifies their algebraic properties.
"""

from .errors import (
    AsymmetricGridError,
    ConfigError,
    DegenerateSpectrumError,
    EigensolverError,
    GridMismatchError,
    InvalidDomainError,
    NonUnimodularWeightError,
    PotentialError,
    SuiteStageError,
    TruncatedOperatorError,
    TruncatedSpectrumError,
    UnnormalizedStateError,
)
from .grids import Grid, inner_product, make_grid
from .operators import (
    GradingWeights,
    OperatorKernel,
    adjoint,
    apply,
    build_graded,
    build_parity,
    build_triparity,
    compose,
    reconstruct_hamiltonian,
    reflection_action,
    write_kernel_csv,
    write_kernel_txt,
)
from .potentials import (
    NAMED_POTENTIALS,
    Potential,
    evaluate,
    is_even,
    named,
    polynomial,
)
from .schrodinger import (
    HamiltonianMatrix,
    Spectrum,
    assemble,
    assemble_from_samples,
    check_completeness,
    check_orthonormality,
    count_nodes,
    solve,
)
from .verify import (
    DEFAULT_TOLERANCES,
    CheckResult,
    VerificationReport,
    check_alternation,
    check_commutator,
    check_conservation,
    check_cube,
    check_hermiticity,
    check_involution,
    check_reflection_reduction,
    corrupt_spectrum,
    run_suite,
    spectral_hermiticity_gap,
)

__version__ = "0.1.0"

__all__ = [
    "AsymmetricGridError",
    "CheckResult",
    "ConfigError",
    "DEFAULT_TOLERANCES",
    "DegenerateSpectrumError",
    "EigensolverError",
    "GradingWeights",
    "Grid",
    "GridMismatchError",
    "HamiltonianMatrix",
    "InvalidDomainError",
    "NAMED_POTENTIALS",
    "NonUnimodularWeightError",
    "OperatorKernel",
    "Potential",
    "PotentialError",
    "Spectrum",
    "SuiteStageError",
    "TruncatedOperatorError",
    "TruncatedSpectrumError",
    "UnnormalizedStateError",
    "VerificationReport",
    "adjoint",
    "apply",
    "assemble",
    "assemble_from_samples",
    "build_graded",
    "build_parity",
    "build_triparity",
    "check_alternation",
    "check_commutator",
    "check_completeness",
    "check_conservation",
    "check_cube",
    "check_hermiticity",
    "check_involution",
    "check_orthonormality",
    "check_reflection_reduction",
    "compose",
    "corrupt_spectrum",
    "count_nodes",
    "evaluate",
    "inner_product",
    "is_even",
    "make_grid",
    "named",
    "polynomial",
    "reconstruct_hamiltonian",
    "reflection_action",
    "run_suite",
    "solve",
    "spectral_hermiticity_gap",
    "write_kernel_csv",
    "write_kernel_txt",
]
