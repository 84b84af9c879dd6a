"""Multi-index arithmetic and the graded basis of H_N.

Multi-indices are plain tuples of non-negative ints.  Axes are numbered
``1..d`` in every public function, matching the JSON formats; array columns
use ``j - 1`` internally.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb
from typing import Iterator, Sequence

import numpy as np

MultiIndex = tuple[int, ...]


def as_index(coords: Sequence[int]) -> MultiIndex:
    I = tuple(int(c) for c in coords)
    if any(c < 0 for c in I):
        raise ValueError(f"multi-index {list(I)} has a negative coordinate")
    return I


def degree(I: Sequence[int]) -> int:
    return sum(I)


def unit(d: int, j: int) -> MultiIndex:
    """The unit multi-index with a 1 on axis ``j`` (1-based)."""
    _check_axis(d, j)
    return tuple(1 if k == j - 1 else 0 for k in range(d))


def increment(I: MultiIndex, j: int) -> MultiIndex:
    """Return ``I + eps_j``."""
    _check_axis(len(I), j)
    return I[: j - 1] + (I[j - 1] + 1,) + I[j:]


def decrement(I: MultiIndex, j: int) -> MultiIndex | None:
    """Return ``I - eps_j`` or ``None`` when coordinate ``j`` is zero."""
    _check_axis(len(I), j)
    if I[j - 1] == 0:
        return None
    return I[: j - 1] + (I[j - 1] - 1,) + I[j:]


def leq(I: Sequence[int], J: Sequence[int]) -> bool:
    """Coordinatewise partial order."""
    if len(I) != len(J):
        raise ValueError(f"dimension mismatch: {len(I)} vs {len(J)}")
    return all(a <= b for a, b in zip(I, J))


def predecessors(I: MultiIndex) -> Iterator[tuple[MultiIndex, int]]:
    """Yield ``(I - eps_j, j)`` for every axis with a positive coordinate.

    The first pair yielded is the lexicographically smallest predecessor.
    """
    for j in range(1, len(I) + 1):
        J = decrement(I, j)
        if J is not None:
            yield J, j


def _check_axis(d: int, j: int) -> None:
    if not 1 <= j <= d:
        raise ValueError(f"axis {j} out of range 1..{d}")


class BasisEnumeration:
    """Graded-lexicographic enumeration of ``{I : |I| <= N}`` in ``d`` variables.

    Within one degree, indices are listed in decreasing tuple order, so the
    degree-1 layer is ``eps_1, ..., eps_d``.  Because the order is
    degree-major, every ``H_M`` with ``M <= N`` is spanned by a prefix.
    """

    def __init__(self, d: int, N: int):
        if d < 1:
            raise ValueError(f"need d >= 1, got {d}")
        if N < 0:
            raise ValueError(f"need N >= 0, got {N}")
        self.d = d
        self.N = N
        indices: list[MultiIndex] = []
        for deg in range(N + 1):
            for axes in combinations_with_replacement(range(d), deg):
                I = [0] * d
                for a in axes:
                    I[a] += 1
                indices.append(tuple(I))
        self.indices: tuple[MultiIndex, ...] = tuple(indices)
        self._rank = {I: k for k, I in enumerate(self.indices)}

        exps = np.array(self.indices, dtype=np.int64).reshape(len(indices), d)
        exps.setflags(write=False)
        self.exponents = exps
        # succ[k, j-1] = rank of indices[k] + eps_j, or -1 past degree N
        succ = np.full((len(indices), d), -1, dtype=np.int64)
        for k, I in enumerate(self.indices):
            if sum(I) < N:
                for j in range(1, d + 1):
                    succ[k, j - 1] = self._rank[increment(I, j)]
        succ.setflags(write=False)
        self.successors = succ

    @property
    def size(self) -> int:
        return len(self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[MultiIndex]:
        return iter(self.indices)

    def __contains__(self, I: object) -> bool:
        return I in self._rank

    def __repr__(self) -> str:
        return f"BasisEnumeration(d={self.d}, N={self.N}, size={self.size})"

    def rank(self, I: Sequence[int]) -> int:
        try:
            return self._rank[tuple(I)]
        except KeyError:
            raise ValueError(
                f"{list(I)} is not a multi-index of degree <= {self.N} in {self.d} variables"
            ) from None

    def unrank(self, k: int) -> MultiIndex:
        if not 0 <= k < len(self.indices):
            raise ValueError(f"rank {k} out of range 0..{len(self.indices) - 1}")
        return self.indices[k]

    def layer_size(self, M: int) -> int:
        """Number of indices with degree <= ``M``."""
        return dimension(self.d, min(M, self.N)) if M >= 0 else 0


def dimension(d: int, N: int) -> int:
    """``binomial(N + d, d)``: the dimension of ``H_N``."""
    return comb(N + d, d)


@lru_cache(maxsize=64)
def enumerate_basis(d: int, N: int) -> BasisEnumeration:
    """Cached :class:`BasisEnumeration`; instances are never mutated."""
    return BasisEnumeration(d, N)
