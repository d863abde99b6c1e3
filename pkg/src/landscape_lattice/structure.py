"""Shift matrices, the distance-``j`` off-diagonal matrices and their block form.

``A_j(n)`` has ones exactly where ``|row - col| == j``. Grouping the indices
by residue mod ``j`` turns it into a direct sum of nearest-neighbour chains
``A_1(k_i)``, whose spectrum is known in closed form.

Permutations are 0-based index tuples: ``perm[a]`` is the original index
placed at position ``a``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, IndexOutOfRange, VerificationFailed
from .linalg import operator_norm

NORM_AGREEMENT_TOL = 1e-10


class Side(str, enum.Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class ShiftMatrix:
    """``R_k`` (ones ``k`` above the diagonal) or ``L_k`` (ones ``k`` below)."""

    size: int
    offset: int
    side: Side

    def __post_init__(self):
        if self.size < 1 or not 1 <= self.offset <= max(self.size - 1, 1):
            raise IndexOutOfRange(f"offset {self.offset} invalid for size {self.size}")

    def realize(self) -> np.ndarray:
        k = self.offset if self.side is Side.RIGHT else -self.offset
        return np.eye(self.size, k=k)


def _check_offset(n: int, j: int) -> None:
    if n < 1:
        raise IndexOutOfRange(f"n must be positive, got {n}")
    if n == 1 and j == 1:
        return
    if not 1 <= j <= n - 1:
        raise IndexOutOfRange(f"offset j={j} must lie in [1, {n - 1}] for n={n}")


def build_offdiagonal(n: int, j: int) -> np.ndarray:
    """``A_j(n) = L_j + R_j``; ``A_1(1)`` is the 1x1 zero matrix."""
    _check_offset(n, j)
    if n == 1:
        return np.zeros((1, 1))
    return np.eye(n, k=j) + np.eye(n, k=-j)


@dataclass(frozen=True)
class BlockDecomposition:
    permutation: tuple[int, ...]
    block_sizes: tuple[int, ...]


def predicted_block_sizes(n: int, j: int) -> tuple[int, ...]:
    """Number of indices in ``1..n`` congruent to ``i`` mod ``j``, for ``i = 1..j``."""
    return tuple((n - i) // j + 1 for i in range(1, j + 1))


def block_permutation(n: int, j: int) -> BlockDecomposition:
    """Reorder the basis as ``[e_1, e_{1+j}, ...], [e_2, e_{2+j}, ...], ..., [e_j, ...]``."""
    _check_offset(n, j)
    groups = [list(range(start, n, j)) for start in range(min(j, n))]
    perm = tuple(i for group in groups for i in group)
    sizes = tuple(len(group) for group in groups)
    if n > 1 and sizes != predicted_block_sizes(n, j):
        raise VerificationFailed(f"group sizes {sizes} disagree with the residue count")
    return BlockDecomposition(perm, sizes)


def conjugate_by_permutation(m, perm) -> np.ndarray:
    """``U m U^T`` for the permutation matrix ``U``, done by pure index remapping."""
    m = np.asarray(m)
    perm = np.asarray(perm, dtype=np.intp)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or perm.shape != (m.shape[0],):
        raise DimensionMismatch(f"permutation of length {perm.size} does not fit shape {m.shape}")
    if not np.array_equal(np.sort(perm), np.arange(perm.size)):
        raise ValueError("not a permutation")
    return m[np.ix_(perm, perm)]


def block_diagonal_chains(sizes) -> np.ndarray:
    """Direct sum of the nearest-neighbour chains ``A_1(k)`` for ``k`` in ``sizes``."""
    n = int(sum(sizes))
    out = np.zeros((n, n))
    start = 0
    for k in sizes:
        out[start:start + k, start:start + k] = build_offdiagonal(k, 1)
        start += k
    return out


def chebyshev_spectrum(n: int) -> np.ndarray:
    """Closed-form eigenvalues ``2 cos(k pi / (n + 1))`` of ``A_1(n)``, ascending."""
    if n < 1:
        raise IndexOutOfRange(f"n must be positive, got {n}")
    k = np.arange(1, n + 1)
    return np.sort(2.0 * np.cos(k * np.pi / (n + 1)))


def verify_strict_gap(n: int, j: int) -> float:
    """Return ``2 - ||A_j(n)||`` after checking it is positive and matches the block norms."""
    a = build_offdiagonal(n, j)
    norm = operator_norm(a)
    sizes = block_permutation(n, j).block_sizes
    block_norm = max(operator_norm(build_offdiagonal(k, 1)) for k in sizes)
    if abs(norm - block_norm) > NORM_AGREEMENT_TOL:
        raise VerificationFailed(f"||A_{j}({n})|| = {norm!r} but block norms give {block_norm!r}")
    gap = 2.0 - norm
    if not gap > 0:
        raise VerificationFailed(f"||A_{j}({n})|| = {norm!r} is not below 2")
    return gap
