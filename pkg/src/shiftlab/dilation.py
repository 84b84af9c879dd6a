"""Finite unitary dilation of the all-ones shift and Brehmer positivity diagnostics."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

import numpy as np

from .multiindex import enumerate_basis
from .shiftbuild import TruncatedShift, build, monomial
from .vncheck import MatrixPolynomial, eval_at_tuple, op_norm, random_polynomial
from .weights import WeightFamily


@dataclass(frozen=True, eq=False)
class DilationCertificate:
    """Cyclic coordinate shifts ``U_j`` on ``l^2((Z_M)^d)`` dilating ``T(1)`` on ``H_{N+1}``.

    The unitaries are permutations and are kept as index maps
    (``perms[j][x]`` is the image of grid point ``x``); ``window[k]`` is the
    grid point carrying the ``k``-th basis vector ``e_I`` of ``H_{N+1}``.
    The compression identity is exact for polynomials of degree at most
    ``degree_bound``; higher degrees can wrap around the grid.
    """

    d: int
    N: int
    degree_bound: int
    M: int
    perms: tuple[np.ndarray, ...] = field(repr=False)
    window: np.ndarray = field(repr=False)
    residual: float
    n_tests: int

    @property
    def grid_size(self) -> int:
        return self.M ** self.d

    def unitaries(self) -> list[np.ndarray]:
        """Dense permutation matrices (``grid_size`` squared entries each)."""
        out = []
        for perm in self.perms:
            U = np.zeros((self.grid_size, self.grid_size))
            U[perm, np.arange(self.grid_size)] = 1.0
            out.append(U)
        return out

    def isometry(self) -> np.ndarray:
        V = np.zeros((self.grid_size, self.window.size))
        V[self.window, np.arange(self.window.size)] = 1.0
        return V

    def compress(self, q: MatrixPolynomial) -> np.ndarray:
        """``V* q(U) V`` computed from the index maps alone."""
        D = self.window.size
        pos = np.full(self.grid_size, -1)
        pos[self.window] = np.arange(D)
        out = np.zeros((q.n * D, q.n * D), dtype=np.complex128)
        cols = np.arange(D)
        for K, C in q.terms.items():
            image = self.window.copy()
            for j, k in enumerate(K):
                for _ in range(k):
                    image = self.perms[j][image]
            rows = pos[image]
            keep = rows >= 0
            block = np.zeros((D, D))
            block[rows[keep], cols[keep]] = 1.0
            out += np.kron(C, block)
        return out

    def compression_residual(self, q: MatrixPolynomial) -> float:
        T1 = build(WeightFamily.constant(self.d, self.N))
        diff = self.compress(q) - eval_at_tuple(q, T1)
        return op_norm(diff)

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "N": self.N,
            "degree_bound": self.degree_bound,
            "grid_per_axis": self.M,
            "grid_size": self.grid_size,
            "residual": self.residual,
            "n_tests": self.n_tests,
        }


def build_cyclic_dilation(N: int, d: int, degree_bound: int, n_tests: int = 50,
                          seed: int | None = 0) -> DilationCertificate:
    """Grid of side ``M = N + degree_bound + 2`` so that ``I + K`` never wraps
    for ``|I| <= N + 1`` and ``|K| <= degree_bound``."""
    if degree_bound < 1:
        raise ValueError(f"degree_bound must be >= 1, got {degree_bound}")
    M = N + degree_bound + 2
    shape = (M,) * d
    grid = np.arange(M ** d).reshape(shape)
    # perms[j][x] = x + e_j (mod M)
    perms = tuple(np.roll(grid, -1, axis=j).ravel() for j in range(d))
    basis = enumerate_basis(d, N + 1)
    window = np.ravel_multi_index(tuple(basis.exponents.T), shape)
    cert = DilationCertificate(d, N, degree_bound, M, perms, window, 0.0, 0)
    rng = np.random.default_rng(seed)
    residual = 0.0
    for _ in range(n_tests):
        q = random_polynomial(d, 1, degree_bound, rng, density=0.5)
        residual = max(residual, cert.compression_residual(q))
    return DilationCertificate(d, N, degree_bound, M, perms, cert.window, residual, n_tests)


def _axes_product(T: TruncatedShift, F: Iterable[int]) -> np.ndarray:
    K = [0] * T.d
    for j in F:
        K[j - 1] += 1
    return monomial(T.mats, K)


def brehmer_defect(T: TruncatedShift, S: Iterable[int]) -> np.ndarray:
    """``sum_{F subset S} (-1)^|F| T^F (T^F)*`` for a set of 1-based axes."""
    S = sorted(set(S))
    if not S:
        raise ValueError("axis set must be nonempty")
    for j in S:
        if not 1 <= j <= T.d:
            raise ValueError(f"axis {j} out of range 1..{T.d}")
    out = np.zeros((T.dim, T.dim), dtype=np.complex128)
    for size in range(len(S) + 1):
        for F in combinations(S, size):
            P = _axes_product(T, F)
            out += (-1) ** size * (P @ P.conj().T)
    return out


def brehmer_eigenvalues(T: TruncatedShift, S: Iterable[int]) -> np.ndarray:
    """Ascending eigenvalues of the (Hermitian) defect."""
    D = brehmer_defect(T, S)
    return np.linalg.eigvalsh(0.5 * (D + D.conj().T))


def doubly_commuting_obstruction(T: TruncatedShift, j: int, k: int,
                                 tol: float = 1e-10) -> tuple[float, str]:
    """Negative pair defect rules out a doubly commuting isometric coextension.

    Positivity is only necessary, so a nonnegative defect is inconclusive.
    """
    if T.d < 2:
        raise ValueError("needs at least two axes")
    if j == k:
        raise ValueError("axes must differ")
    lo = float(brehmer_eigenvalues(T, {j, k})[0])
    if lo < -tol:
        return lo, "no doubly-commuting isometric coextension"
    return lo, "inconclusive"
