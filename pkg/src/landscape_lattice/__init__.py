"""Landscape functions for long-range discrete Schrödinger operators on a 1-D lattice."""
from .errors import (
    ConditionViolated,
    ContractionFailure,
    DimensionMismatch,
    IndexOutOfRange,
    InvalidSpec,
    LandscapeError,
    NoConvergence,
    NonPositiveSpectrum,
    NotSymmetric,
    SingularMatrix,
    VerificationFailed,
)
from .linalg import SymmetricEigenDecomposition, operator_norm, solve_linear, symmetric_eigen
from .operator import (
    ConditionRegime,
    HoppingProfile,
    LatticeOperator,
    PotentialVector,
    Regime,
    assemble,
    build_hopping_matrix,
    classify_condition,
    hopping_norm_bound,
)
from .landscape import (
    GreenFunction,
    LandscapeReport,
    NeumannCertificate,
    analyze,
    green_direct,
    green_series,
    landscape_function,
    verify_landscape_bound,
)
from .structure import (
    BlockDecomposition,
    ShiftMatrix,
    Side,
    block_permutation,
    build_offdiagonal,
    chebyshev_spectrum,
    conjugate_by_permutation,
    verify_strict_gap,
)
from .ensemble import EnsembleSpec, EnsembleSummary, HoppingLaw, RegimeTarget, generate_instance, run_ensemble

__version__ = "0.1.0"
