"""Green's function, landscape function and the eigenvector landscape bound."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConditionViolated, ContractionFailure, NonPositiveSpectrum
from .linalg import SymmetricEigenDecomposition, max_norm, operator_norm, solve_linear, symmetric_eigen
from .operator import LatticeOperator, Regime

GREEN_NEGATIVITY_RTOL = 1e-12
BOUND_TOL = 1e-9
SPECTRUM_FLOOR = 1e-12


@dataclass(frozen=True)
class NeumannCertificate:
    """Truncation certificate for ``sum_{k<=K} (V^-1 H0)^k V^-1``.

    ``contraction_q`` uses the computed spectral norm of ``H0``;
    ``analytic_q`` is the same quantity with ``2 * sum(a_i)`` in its place.
    """

    contraction_q: float
    truncation_order: int
    error_bound: float
    inverse_potential_norm: float
    analytic_q: float


@dataclass(frozen=True)
class GreenFunction:
    g: np.ndarray
    method: str
    min_entry: float
    certificate: NeumannCertificate | None = None
    residual: float | None = None

    @property
    def max_abs_entry(self) -> float:
        return max_norm(self.g)

    def nonnegative(self) -> bool:
        return self.min_entry >= -GREEN_NEGATIVITY_RTOL * self.max_abs_entry


@dataclass(frozen=True)
class LandscapeReport:
    u: np.ndarray
    eigenpairs: SymmetricEigenDecomposition
    margins: np.ndarray
    positivity_ok: bool
    bound_ok: bool

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenpairs.eigenvalues[0])

    @property
    def min_margin(self) -> float:
        return float(np.min(self.margins))


def _require_regime(op: LatticeOperator, override: bool) -> None:
    if op.regime.kind is Regime.VIOLATED and not override:
        raise ConditionViolated(
            f"min potential falls short of 2*sum(a) by {-op.regime.margin:.6g}; pass override=True to proceed"
        )


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def green_direct(op: LatticeOperator, override: bool = False) -> GreenFunction:
    """Invert ``H`` by LU with partial pivoting."""
    _require_regime(op, override)
    n = op.n
    g = solve_linear(op.h, np.eye(n))
    residual = max_norm(g @ op.h - np.eye(n))
    return GreenFunction(_freeze(g), "direct", float(g.min()), residual=residual)


def neumann_certificate(op: LatticeOperator, order: int) -> NeumannCertificate:
    inv_norm = float(np.max(1.0 / op.potential.values))
    q = operator_norm(op.hopping_matrix) * inv_norm
    if q >= 1.0:
        raise ContractionFailure(f"contraction factor {q:.6g} is not below 1")
    bound = inv_norm * q ** (order + 1) / (1.0 - q)
    return NeumannCertificate(q, order, bound, inv_norm, op.hopping.hop_sum * inv_norm)


def green_series(op: LatticeOperator, order: int, override: bool = False) -> GreenFunction:
    """Truncated Neumann series ``sum_{k=0}^{order} (V^-1 H0)^k V^-1``.

    Every term is entrywise nonnegative, so the partial sums increase
    monotonically towards ``H^-1``.
    """
    if order < 0:
        raise ValueError("series order must be nonnegative")
    _require_regime(op, override)
    cert = neumann_certificate(op, order)

    inv_v = 1.0 / op.potential.values
    step = op.hopping_matrix * inv_v[:, None]
    term = np.diag(inv_v)
    total = term.copy()
    for _ in range(order):
        term = step @ term
        total += term
    return GreenFunction(_freeze(total), "series", float(total.min()), certificate=cert)


def landscape_function(g) -> np.ndarray:
    """Row sums of the Green's function, i.e. the solution of ``H u = 1``."""
    mat = g.g if isinstance(g, GreenFunction) else np.asarray(g, dtype=np.float64)
    return _freeze(mat.sum(axis=1))


def bound_margins(u: np.ndarray, eig: SymmetricEigenDecomposition) -> np.ndarray:
    """``min_j (lambda * u_j - |x_j| / max_k |x_k|)`` for each eigenpair."""
    x = np.abs(eig.eigenvectors)
    ratios = x / x.max(axis=0)
    return np.min(eig.eigenvalues[None, :] * np.asarray(u)[:, None] - ratios, axis=0)


def verify_landscape_bound(
    op: LatticeOperator,
    u,
    eig: SymmetricEigenDecomposition,
    green: GreenFunction | None = None,
) -> LandscapeReport:
    """Check ``|x_j| / max|x| <= lambda * u_j`` for every eigenpair.

    Positivity covers ``u > 0`` and, when ``green`` is supplied, entrywise
    nonnegativity of the Green's function. Under a Violated regime the flags
    are observations only.
    """
    u = np.asarray(u, dtype=np.float64)
    if op.regime.guarantees_positivity and eig.eigenvalues[0] <= SPECTRUM_FLOOR:
        raise NonPositiveSpectrum(
            f"smallest eigenvalue {eig.eigenvalues[0]:.3e} in {op.regime.kind.value} regime"
        )
    margins = _freeze(bound_margins(u, eig))
    positivity = bool(np.all(u > 0))
    if green is not None:
        positivity = positivity and green.nonnegative()
    return LandscapeReport(
        u=u,
        eigenpairs=eig,
        margins=margins,
        positivity_ok=positivity,
        bound_ok=bool(np.all(margins >= -BOUND_TOL)),
    )


def analyze(op: LatticeOperator, override: bool = False) -> tuple[GreenFunction, LandscapeReport]:
    """Direct inverse, landscape, eigendecomposition and bound check in one pass."""
    green = green_direct(op, override=override)
    u = landscape_function(green)
    eig = symmetric_eigen(op.h)
    return green, verify_landscape_bound(op, u, eig, green)
