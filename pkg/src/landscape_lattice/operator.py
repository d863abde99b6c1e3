"""Lattice operators ``H = V - H0`` with a Toeplitz hopping term.

``V`` is the diagonal on-site potential and ``H0`` the symmetric Toeplitz
matrix carrying hopping amplitude ``a[k-1]`` at index distance ``k``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch

SOFT_BOUNDARY_RTOL = 1e-12


def _frozen_vector(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class HoppingProfile:
    """Nonnegative hopping amplitudes ``a_1 .. a_{n-1}`` for a lattice of ``n`` sites."""

    coefficients: np.ndarray
    lattice_size: int

    def __init__(self, coefficients, lattice_size: int | None = None):
        coeffs = _frozen_vector(coefficients, "hopping coefficients")
        n = coeffs.size + 1 if lattice_size is None else int(lattice_size)
        if n < 1:
            raise ValueError("lattice_size must be >= 1")
        if coeffs.size != n - 1:
            raise DimensionMismatch(
                f"a lattice of {n} sites needs {n - 1} hopping coefficients, got {coeffs.size}"
            )
        if np.any(coeffs < 0):
            raise ValueError("hopping coefficients must be nonnegative")
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "lattice_size", n)

    @classmethod
    def nearest_neighbor(cls, n: int, amplitude: float = 1.0) -> "HoppingProfile":
        coeffs = np.zeros(max(n - 1, 0))
        if n > 1:
            coeffs[0] = amplitude
        return cls(coeffs, n)

    @classmethod
    def geometric(cls, n: int, rate: float) -> "HoppingProfile":
        """Long-range profile ``a_i = rate**i``."""
        if not 0.0 <= rate < 1.0:
            raise ValueError("geometric decay rate must satisfy 0 <= rate < 1")
        return cls(rate ** np.arange(1, n, dtype=np.float64), n)

    @property
    def hop_sum(self) -> float:
        """``2 * sum(a_i)``, the quantity the potential has to dominate."""
        return 2.0 * float(np.sum(self.coefficients))

    @property
    def is_zero(self) -> bool:
        return not np.any(self.coefficients > 0)


@dataclass(frozen=True)
class PotentialVector:
    values: np.ndarray

    def __init__(self, values):
        vals = _frozen_vector(values, "potential")
        if vals.size < 1:
            raise ValueError("potential needs at least one site")
        if np.any(vals <= 0):
            raise ValueError("potential values must be strictly positive")
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, n: int, value: float) -> "PotentialVector":
        return cls(np.full(n, float(value)))

    def __len__(self) -> int:
        return self.values.size


class Regime(str, enum.Enum):
    STRICT = "strict"
    SOFT_BOUNDARY = "soft_boundary"
    VIOLATED = "violated"


@dataclass(frozen=True)
class ConditionRegime:
    kind: Regime
    margin: float

    @property
    def guarantees_positivity(self) -> bool:
        return self.kind is not Regime.VIOLATED


@dataclass(frozen=True)
class LatticeOperator:
    h: np.ndarray
    potential: PotentialVector
    hopping: HoppingProfile
    regime: ConditionRegime

    @property
    def n(self) -> int:
        return self.h.shape[0]

    @property
    def hopping_matrix(self) -> np.ndarray:
        return build_hopping_matrix(self.hopping)


def build_hopping_matrix(profile: HoppingProfile) -> np.ndarray:
    """Symmetric Toeplitz ``H0`` with zero diagonal and ``a_{|i-j|}`` off it."""
    n = profile.lattice_size
    first_row = np.concatenate(([0.0], profile.coefficients))
    idx = np.arange(n)
    h0 = first_row[np.abs(idx[:, None] - idx[None, :])]
    h0.setflags(write=False)
    return h0


def _check_sizes(potential: PotentialVector, profile: HoppingProfile) -> None:
    if len(potential) != profile.lattice_size:
        raise DimensionMismatch(
            f"potential has {len(potential)} sites, hopping profile has {profile.lattice_size}"
        )


def classify_condition(potential: PotentialVector, profile: HoppingProfile) -> ConditionRegime:
    """Compare ``min v_j`` against ``2 * sum(a_i)``.

    Zero hopping is Strict since the potential is positive by construction.
    """
    _check_sizes(potential, profile)
    hop_sum = profile.hop_sum
    margin = float(np.min(potential.values)) - hop_sum
    if hop_sum > 0 and abs(margin) <= SOFT_BOUNDARY_RTOL * hop_sum:
        kind = Regime.SOFT_BOUNDARY
    elif margin > 0:
        kind = Regime.STRICT
    else:
        kind = Regime.VIOLATED
    return ConditionRegime(kind, margin)


def assemble(potential: PotentialVector, profile: HoppingProfile) -> LatticeOperator:
    """Build ``H = diag(v) - H0``; a Violated regime is recorded, not rejected."""
    regime = classify_condition(potential, profile)
    h = -build_hopping_matrix(profile)
    np.fill_diagonal(h, potential.values)
    h.setflags(write=False)
    return LatticeOperator(h, potential, profile, regime)


def hopping_norm_bound(profile: HoppingProfile) -> float:
    """Triangle-inequality bound ``2 * sum(a_i)`` on the spectral norm of ``H0``."""
    return profile.hop_sum
