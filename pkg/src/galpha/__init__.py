"""Split generalized-α integration of the wave equation on tensor-product meshes."""

from .basis1d import Basis1D, Continuity, KnotVector, assemble_mass_1d, assemble_stiffness_1d, build_basis, eval_basis
from .banded import BandedSymMatrix
from .errors import DimensionError, DomainError, FactorizationError, GalphaError, ParameterError
from .integrator import (
    AlphaParams,
    SolverState,
    SplitStepper,
    StandardStepper,
    Variant,
    initial_acceleration,
    params_from_rho,
    run,
    step_split,
    step_standard,
)
from .problems import ErrorReport, ManufacturedCase, error_norms, manufactured_case, project_initial
from .spectral import (
    Scheme,
    amplification_naive_lhs,
    amplification_split,
    amplification_standard,
    generalized_eigs_1d,
    scan_stability,
    spectral_radius,
)
from .tensor_ops import (
    KroneckerMass,
    KroneckerStiffness,
    PencilFactorization,
    factorize_pencils,
    gtilde_defect_norm,
    kron_apply_mass,
    kron_apply_stiffness,
    solve_gtilde,
    solve_mass,
)

__all__ = [name for name in dir() if not name.startswith("_")]
