"""Weight families of truncated multivariable shifts.

A family stores ``w[I, j]`` for every ``|I| <= N`` and axis ``j``, as a
complex array of shape ``(dim H_N, d)`` whose rows follow the graded basis
order of :mod:`shiftlab.multiindex`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Mapping

import numpy as np

from .errors import CommutationError, DomainError, StructureError
from .multiindex import BasisEnumeration, MultiIndex, enumerate_basis, predecessors

DEFAULT_TOL = 1e-10
UNIMODULAR_TOL = 1e-12


def _frozen(a: np.ndarray, dtype) -> np.ndarray:
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class WeightFamily:
    d: int
    N: int
    w: np.ndarray = field(repr=False)

    def __post_init__(self):
        expected = (enumerate_basis(self.d, self.N).size, self.d)
        w = np.asarray(self.w)
        if w.shape != expected:
            raise StructureError(f"weight array has shape {w.shape}, expected {expected}")
        if not np.all(np.isfinite(w)):
            raise DomainError("weights must be finite")
        object.__setattr__(self, "w", _frozen(w, np.complex128))

    @classmethod
    def from_entries(cls, d: int, N: int, entries: Mapping[tuple[MultiIndex, int], complex]):
        """Build from a ``{(I, j): w}`` mapping; every entry must be present."""
        basis = enumerate_basis(d, N)
        w = np.empty((basis.size, d), dtype=np.complex128)
        seen = np.zeros((basis.size, d), dtype=bool)
        for (I, j), val in entries.items():
            if not 1 <= j <= d:
                raise StructureError(f"axis {j} out of range 1..{d} for I={list(I)}")
            k = basis.rank(I)
            w[k, j - 1] = val
            seen[k, j - 1] = True
        if not seen.all():
            k, j0 = np.argwhere(~seen)[0]
            raise StructureError(
                f"missing weight entry (I={list(basis.unrank(int(k)))}, j={int(j0) + 1})"
            )
        return cls(d, N, w)

    @classmethod
    def constant(cls, d: int, N: int, value: complex = 1.0):
        return cls(d, N, np.full((enumerate_basis(d, N).size, d), value, dtype=np.complex128))

    @property
    def basis(self) -> BasisEnumeration:
        return enumerate_basis(self.d, self.N)

    def __getitem__(self, key: tuple[MultiIndex, int]) -> complex:
        I, j = key
        return complex(self.w[self.basis.rank(I), j - 1])

    def entries(self):
        """Iterate ``((I, j), w_{I,j})`` in basis order."""
        for k, I in enumerate(self.basis):
            for j in range(1, self.d + 1):
                yield (I, j), complex(self.w[k, j - 1])

    @property
    def injective(self) -> bool:
        return bool(np.all(self.w != 0))

    def is_contractive(self, tol: float = UNIMODULAR_TOL) -> bool:
        return bool(np.all(np.abs(self.w) <= 1 + tol))

    def unimodular_mask(self, tol: float = UNIMODULAR_TOL) -> np.ndarray:
        return np.abs(np.abs(self.w) - 1) <= tol

    def in_boundary(self, tol: float = UNIMODULAR_TOL) -> bool:
        """All weights have modulus one (the set ``X_0``)."""
        return bool(self.unimodular_mask(tol).all())

    def restrict(self, M: int) -> "WeightFamily":
        """Keep the weights with ``|I| <= M``."""
        if not 0 <= M <= self.N:
            raise ValueError(f"restriction level {M} must lie in 0..{self.N}")
        return WeightFamily(self.d, M, self.w[: enumerate_basis(self.d, M).size])

    def replace(self, w: np.ndarray) -> "WeightFamily":
        return WeightFamily(self.d, self.N, w)

    def modulus(self) -> "WeightFamily":
        return WeightFamily(self.d, self.N, np.abs(self.w))


@dataclass(frozen=True)
class ValidationReport:
    max_residual: float
    violations: tuple[tuple[MultiIndex, int, int], ...]
    tol: float

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "max_residual": self.max_residual,
            "tol": self.tol,
            "ok": self.ok,
            "violations": [{"I": list(I), "j": j, "k": k} for I, j, k in self.violations],
        }


def commutation_residuals(W: WeightFamily) -> np.ndarray:
    """``|w_{I,j} w_{I+e_j,k} - w_{I,k} w_{I+e_k,j}|`` for ``|I| <= N-1``.

    Shape ``(dim H_{N-1}, d, d)``; antisymmetric in ``(j, k)`` up to sign.
    """
    if W.N == 0:
        return np.zeros((0, W.d, W.d))
    basis = W.basis
    n_inner = enumerate_basis(W.d, W.N - 1).size
    succ = basis.successors[:n_inner]  # all valid since |I| <= N-1
    w = W.w
    # lhs[I, j, k] = w[I, j] * w[I + e_j, k]
    lhs = w[:n_inner, :, None] * w[succ]
    return np.abs(lhs - np.swapaxes(lhs, 1, 2))


def validate_commuting(W: WeightFamily, tol: float = DEFAULT_TOL) -> ValidationReport:
    res = commutation_residuals(W)
    max_res = float(res.max()) if res.size else 0.0
    bad = []
    if max_res > tol:
        for k, j, l in np.argwhere(res > tol):
            if j < l:
                bad.append((W.basis.unrank(int(k)), int(j) + 1, int(l) + 1))
    return ValidationReport(max_res, tuple(bad), tol)


def require_commuting(W: WeightFamily, tol: float = DEFAULT_TOL) -> None:
    report = validate_commuting(W, tol)
    if not report.ok:
        I, j, k = report.violations[0]
        raise CommutationError(
            f"commutation relation fails at I={list(I)}, j={j}, k={k} "
            f"(max residual {report.max_residual:.3g} > tol {tol:g})"
        )


@dataclass(frozen=True, eq=False)
class BetaFamily:
    """Norms ``beta_I = ||T^I e_0||`` for ``|I| <= N + 1``."""

    d: int
    N: int
    beta: np.ndarray = field(repr=False)

    def __post_init__(self):
        expected = (enumerate_basis(self.d, self.N + 1).size,)
        b = np.asarray(self.beta, dtype=np.float64)
        if b.shape != expected:
            raise StructureError(f"beta array has shape {b.shape}, expected {expected}")
        if not np.all(b > 0):
            raise DomainError("all beta_I must be strictly positive")
        if abs(b[0] - 1.0) > 1e-14:
            raise DomainError(f"beta at (0,...,0) must be 1, got {b[0]}")
        object.__setattr__(self, "beta", _frozen(b, np.float64))

    @classmethod
    def from_entries(cls, d: int, N: int, entries: Mapping[MultiIndex, float]):
        basis = enumerate_basis(d, N + 1)
        b = np.full(basis.size, np.nan)
        for I, val in entries.items():
            b[basis.rank(I)] = val
        if np.isnan(b).any():
            k = int(np.flatnonzero(np.isnan(b))[0])
            raise StructureError(f"missing beta entry I={list(basis.unrank(k))}")
        return cls(d, N, b)

    @property
    def basis(self) -> BasisEnumeration:
        return enumerate_basis(self.d, self.N + 1)

    def __getitem__(self, I: MultiIndex) -> float:
        return float(self.beta[self.basis.rank(I)])


def weights_from_beta(B: BetaFamily) -> WeightFamily:
    """``w_{I,j} = beta_{I+e_j} / beta_I``."""
    outer = B.basis
    n = enumerate_basis(B.d, B.N).size
    succ = outer.successors[:n]
    w = B.beta[succ] / B.beta[:n, None]
    return WeightFamily(B.d, B.N, w)


def beta_from_weights(W: WeightFamily, rtol: float = 1e-9) -> BetaFamily:
    """Multiply ``|w|`` along lattice paths from the origin.

    Each ``beta_I`` is defined through its lexicographically smallest
    predecessor; every other predecessor must give the same value.
    """
    if not W.injective:
        raise DomainError("non-injective family has no beta representation (zero weights present)")
    outer = enumerate_basis(W.d, W.N + 1)
    inner = W.basis
    a = np.abs(W.w)
    beta = np.empty(outer.size)
    beta[0] = 1.0
    for k in range(1, outer.size):
        I = outer.unrank(k)
        vals = [beta[inner.rank(J)] * a[inner.rank(J), j - 1] for J, j in predecessors(I)]
        if max(vals) - min(vals) > rtol * max(vals):
            raise CommutationError(
                f"path products to I={list(I)} disagree ({min(vals):.6g} vs {max(vals):.6g})"
            )
        beta[k] = vals[0]
    return BetaFamily(W.d, W.N, beta)


def random_beta(d: int, N: int, rng: np.random.Generator, p_flat: float = 0.3,
                scale: float = 0.5) -> BetaFamily:
    """Random non-increasing ``beta``, so every ratio lies in ``(0, 1]``.

    ``-log beta_I`` is the max over predecessors plus an increment that is
    zero with probability ``p_flat``; flat increments produce unimodular
    weights and hence nontrivial good sets.
    """
    outer = enumerate_basis(d, N + 1)
    c = np.zeros(outer.size)
    for k in range(1, outer.size):
        I = outer.unrank(k)
        base = max(c[outer.rank(J)] for J, _ in predecessors(I))
        inc = 0.0 if rng.random() < p_flat else rng.exponential(scale)
        c[k] = base + inc
    return BetaFamily(d, N, np.exp(-c))


def random_gauge(d: int, N: int, rng: np.random.Generator) -> np.ndarray:
    """Unit-modulus ``lambda_I`` on the level ``N + 1`` basis with ``lambda_0 = 1``."""
    n = enumerate_basis(d, N + 1).size
    lam = np.exp(2j * np.pi * rng.random(n))
    lam[0] = 1.0
    return lam


def apply_gauge(W: WeightFamily, lam: np.ndarray) -> WeightFamily:
    """``w_{I,j} * lambda_{I+e_j} / lambda_I``; preserves commutation exactly."""
    n = W.basis.size
    succ = enumerate_basis(W.d, W.N + 1).successors[:n]
    return W.replace(W.w * lam[succ] / lam[:n, None])


def random_contractive_family(
    d: int,
    N: int,
    seed: int | np.random.Generator | None = None,
    profile: Literal["positive", "complex-nonzero"] = "positive",
    p_flat: float = 0.3,
) -> WeightFamily:
    """Random injective contractive commuting family, deterministic in ``seed``."""
    if profile not in ("positive", "complex-nonzero"):
        raise ValueError(f"unknown profile {profile!r}")
    rng = np.random.default_rng(seed)
    W = weights_from_beta(random_beta(d, N, rng, p_flat=p_flat))
    if profile == "complex-nonzero":
        W = apply_gauge(W, random_gauge(d, N, rng))
    return W
