"""Truncated weighted shifts as dense matrices on ``H_{N+1}``."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np

from .multiindex import BasisEnumeration, enumerate_basis
from .weights import DEFAULT_TOL, WeightFamily, require_commuting


@dataclass(frozen=True, eq=False)
class TruncatedShift:
    weights: WeightFamily
    mats: tuple[np.ndarray, ...] = field(repr=False)

    @property
    def d(self) -> int:
        return self.weights.d

    @property
    def N(self) -> int:
        return self.weights.N

    @property
    def basis(self) -> BasisEnumeration:
        """Basis of ``H_{N+1}``, the space the matrices act on."""
        return enumerate_basis(self.d, self.N + 1)

    @property
    def dim(self) -> int:
        return self.basis.size

    def __getitem__(self, j: int) -> np.ndarray:
        """``T_j`` with a 1-based axis."""
        if not 1 <= j <= self.d:
            raise ValueError(f"axis {j} out of range 1..{self.d}")
        return self.mats[j - 1]

    def commutator_norm(self) -> float:
        out = 0.0
        for a in range(self.d):
            for b in range(a + 1, self.d):
                C = self.mats[a] @ self.mats[b] - self.mats[b] @ self.mats[a]
                out = max(out, float(np.abs(C).max()) if C.size else 0.0)
        return out


def shift_matrices(W: WeightFamily) -> tuple[np.ndarray, ...]:
    """The matrices ``T_j`` without validating the commutation relations."""
    outer = enumerate_basis(W.d, W.N + 1)
    n = W.basis.size
    cols = np.arange(n)
    mats = []
    for j in range(W.d):
        T = np.zeros((outer.size, outer.size), dtype=np.complex128)
        T[outer.successors[:n, j], cols] = W.w[:, j]
        T.setflags(write=False)
        mats.append(T)
    return tuple(mats)


def build(W: WeightFamily, tol: float = DEFAULT_TOL) -> TruncatedShift:
    """``T_j e_I = w_{I,j} e_{I+e_j}`` for ``|I| <= N``; the top layer is annihilated.

    Raises :class:`CommutationError` when ``W`` is not commuting within ``tol``.
    """
    require_commuting(W, tol)
    return TruncatedShift(W, shift_matrices(W))


def compress(T: TruncatedShift, M: int) -> TruncatedShift:
    """Compression of ``T`` to ``H_{M+1}``; again a truncated shift."""
    if not 0 <= M <= T.N:
        raise ValueError(f"compression level {M} must lie in 0..{T.N}")
    W = T.weights.restrict(M)
    return TruncatedShift(W, shift_matrices(W))


def monomial(mats: Sequence[np.ndarray], K: Sequence[int]) -> np.ndarray:
    """``T^K`` for a commuting tuple of matrices."""
    if len(K) != len(mats):
        raise ValueError(f"exponent {list(K)} has length {len(K)}, expected {len(mats)}")
    D = mats[0].shape[0]
    factors = [np.linalg.matrix_power(A, k) for A, k in zip(mats, K) if k]
    return reduce(np.matmul, factors, np.eye(D, dtype=np.complex128))


def apply_monomial(T: TruncatedShift, K: Sequence[int]) -> np.ndarray:
    if len(K) != T.d:
        raise ValueError(f"exponent {list(K)} has length {len(K)}, expected {T.d}")
    if sum(K) > T.N + 1:
        return np.zeros((T.dim, T.dim), dtype=np.complex128)
    return monomial(T.mats, K)
