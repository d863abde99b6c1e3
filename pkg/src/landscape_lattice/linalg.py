"""Dense real linear algebra: LU solve, cyclic Jacobi eigensolver, spectral norm.

Matrices are plain ``numpy.ndarray`` of dtype float64. Every entry point
validates its input (2-D, finite) and never mutates it.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NotSymmetric, SingularMatrix

PIVOT_THRESHOLD = 1e-13
SYMMETRY_THRESHOLD = 1e-12
MAX_SWEEPS = 100

_EPS = np.finfo(np.float64).eps


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Validate ``m`` as a finite 2-D float array and return a read-only copy."""
    a = np.array(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionMismatch(f"{name} must be a non-empty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    a.setflags(write=False)
    return a


def max_norm(m) -> float:
    """Largest absolute entry."""
    a = np.asarray(m, dtype=np.float64)
    return float(np.max(np.abs(a))) if a.size else 0.0


def _square(m, name: str) -> np.ndarray:
    a = as_matrix(m, name)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    return a


def solve_linear(m, rhs) -> np.ndarray:
    """Solve ``m @ x = rhs`` by LU factorisation with partial pivoting.

    ``rhs`` may be a vector or a matrix of stacked right-hand sides.
    Raises :class:`SingularMatrix` when a pivot falls below
    ``PIVOT_THRESHOLD`` times the largest entry of its (original) row.
    """
    a = _square(m, "m").copy()
    n = a.shape[0]
    b = np.array(rhs, dtype=np.float64)
    vector = b.ndim == 1
    if vector:
        b = b[:, None]
    if b.ndim != 2 or b.shape[0] != n:
        raise DimensionMismatch(f"rhs has {b.shape[0] if b.ndim else 0} rows, matrix has {n}")
    if not np.all(np.isfinite(b)):
        raise ValueError("rhs has non-finite entries")

    row_scale = np.max(np.abs(a), axis=1)
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if p != k:
            a[[k, p]] = a[[p, k]]
            b[[k, p]] = b[[p, k]]
            row_scale[[k, p]] = row_scale[[p, k]]
        pivot = a[k, k]
        if abs(pivot) <= PIVOT_THRESHOLD * row_scale[k] or pivot == 0.0:
            raise SingularMatrix(f"pivot {pivot:.3e} at step {k} is below threshold")
        if k + 1 < n:
            factors = a[k + 1:, k] / pivot
            a[k + 1:, k + 1:] -= np.outer(factors, a[k, k + 1:])
            a[k + 1:, k] = 0.0
            b[k + 1:] -= np.outer(factors, b[k])

    x = np.empty_like(b)
    for i in range(n - 1, -1, -1):
        x[i] = (b[i] - a[i, i + 1:] @ x[i + 1:]) / a[i, i]
    return x[:, 0] if vector else x


@dataclass(frozen=True)
class SymmetricEigenDecomposition:
    """Eigenvalues in ascending order; ``eigenvectors[:, k]`` pairs with ``eigenvalues[k]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __iter__(self):
        return iter((self.eigenvalues, self.eigenvectors))

    def pairs(self):
        for k in range(self.eigenvalues.shape[0]):
            yield float(self.eigenvalues[k]), self.eigenvectors[:, k]

    def reconstruct(self) -> np.ndarray:
        q = self.eigenvectors
        return (q * self.eigenvalues) @ q.T


@lru_cache(maxsize=None)
def _round_robin(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    # Tournament schedule: every (p, q) pair appears exactly once per sweep and
    # pairs within one round are disjoint, so a round's rotations commute.
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p < n and q < n:
                ps.append(min(p, q))
                qs.append(max(p, q))
        rounds.append((np.array(ps, dtype=np.intp), np.array(qs, dtype=np.intp)))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def symmetric_eigen(m) -> SymmetricEigenDecomposition:
    """Full eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Rotations are scheduled in round-robin order so the disjoint rotations of a
    round are applied together as vectorised row/column updates.
    """
    a = _square(m, "m")
    scale = max_norm(a)
    if max_norm(a - a.T) > SYMMETRY_THRESHOLD * scale:
        raise NotSymmetric(f"asymmetry {max_norm(a - a.T):.3e} exceeds tolerance")

    n = a.shape[0]
    # power-of-two scaling is exact and keeps the off-diagonal norm from under/overflowing
    shift = int(np.frexp(scale)[1]) if scale > 0 else 0
    a = np.ldexp(0.5 * (a + a.T), -shift)
    v = np.eye(n)
    off_diag = ~np.eye(n, dtype=bool)
    tol = _EPS * np.linalg.norm(a)

    sweeps = 0
    while np.sqrt(np.sum(a[off_diag] ** 2)) > tol:
        if sweeps == MAX_SWEEPS:
            raise NoConvergence(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")
        sweeps += 1
        for p, q in _round_robin(n):
            apq = a[p, q]
            keep = apq != 0.0
            if not np.any(keep):
                continue
            p, q, apq = p[keep], q[keep], apq[keep]
            with np.errstate(over="ignore"):
                # |tau| -> inf gives t = 0, the correct limit
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.where(tau >= 0.0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
            c = 1.0 / np.hypot(1.0, t)
            s = t * c

            row_p, row_q = a[p, :], a[q, :]
            a[p, :] = c[:, None] * row_p - s[:, None] * row_q
            a[q, :] = s[:, None] * row_p + c[:, None] * row_q
            col_p, col_q = a[:, p], a[:, q]
            a[:, p] = col_p * c - col_q * s
            a[:, q] = col_p * s + col_q * c
            a[p, q] = 0.0
            a[q, p] = 0.0

            vp, vq = v[:, p], v[:, q]
            v[:, p] = vp * c - vq * s
            v[:, q] = vp * s + vq * c

    values = np.ldexp(np.diag(a), shift)
    order = np.argsort(values, kind="stable")
    values = values[order]
    vectors = np.ascontiguousarray(v[:, order])
    values.setflags(write=False)
    vectors.setflags(write=False)
    return SymmetricEigenDecomposition(values, vectors)


def operator_norm(m) -> float:
    """Spectral norm of a symmetric matrix, i.e. its largest absolute eigenvalue."""
    values = symmetric_eigen(m).eigenvalues
    return float(max(abs(values[0]), abs(values[-1])))
