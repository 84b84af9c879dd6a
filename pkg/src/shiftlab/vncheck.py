"""Matrix polynomials, operator norms, torus sup-norms and the von Neumann ratio."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from . import _kernels
from .errors import DomainError
from .multiindex import MultiIndex, as_index
from .shiftbuild import TruncatedShift, apply_monomial, monomial


@dataclass(frozen=True, eq=False)
class MatrixPolynomial:
    """``sum_K coeff_K z^K`` with ``n x n`` complex coefficients in ``d`` variables."""

    d: int
    n: int
    terms: Mapping[MultiIndex, np.ndarray] = field(repr=False)

    def __post_init__(self):
        clean = {}
        for K, C in self.terms.items():
            K = as_index(K)
            if len(K) != self.d:
                raise ValueError(f"exponent {list(K)} has length {len(K)}, expected {self.d}")
            C = np.array(C, dtype=np.complex128).reshape(self.n, self.n)
            if K in clean:
                C = C + clean[K]
            C.setflags(write=False)
            clean[K] = C
        object.__setattr__(self, "terms", clean)

    @classmethod
    def scalar(cls, d: int, coeffs: Mapping[Sequence[int], complex]) -> "MatrixPolynomial":
        return cls(d, 1, {tuple(K): np.array([[c]]) for K, c in coeffs.items()})

    @classmethod
    def variable(cls, d: int, j: int) -> "MatrixPolynomial":
        return cls.scalar(d, {tuple(int(i == j - 1) for i in range(d)): 1.0})

    @classmethod
    def constant(cls, d: int, C) -> "MatrixPolynomial":
        C = np.atleast_2d(np.asarray(C, dtype=np.complex128))
        return cls(d, C.shape[0], {(0,) * d: C})

    @property
    def degree(self) -> int:
        degs = [sum(K) for K, C in self.terms.items() if np.any(C != 0)]
        return max(degs) if degs else -1

    def is_zero(self) -> bool:
        return self.degree < 0

    def exponent_array(self) -> np.ndarray:
        return np.array(list(self.terms), dtype=np.int64).reshape(len(self.terms), self.d)

    def coeff_array(self) -> np.ndarray:
        if not self.terms:
            return np.zeros((0, self.n, self.n), dtype=np.complex128)
        return np.stack(list(self.terms.values()))

    def lipschitz_constant(self) -> float:
        """``sum_K ||coeff_K|| |K|``: a Lipschitz bound of ``theta -> ||p(e^{i theta})||``
        with respect to the max-norm on angles."""
        return float(sum(op_norm(C) * sum(K) for K, C in self.terms.items() if sum(K)))

    def __add__(self, other: "MatrixPolynomial") -> "MatrixPolynomial":
        self._check_compatible(other)
        terms = dict(self.terms)
        for K, C in other.terms.items():
            terms[K] = terms[K] + C if K in terms else C
        return MatrixPolynomial(self.d, self.n, terms)

    def __mul__(self, other: "MatrixPolynomial") -> "MatrixPolynomial":
        self._check_compatible(other)
        terms: dict[MultiIndex, np.ndarray] = {}
        for (K, A), (L, B) in product(self.terms.items(), other.terms.items()):
            KL = tuple(a + b for a, b in zip(K, L))
            terms[KL] = terms[KL] + A @ B if KL in terms else A @ B
        return MatrixPolynomial(self.d, self.n, terms)

    def scale(self, c: complex) -> "MatrixPolynomial":
        return MatrixPolynomial(self.d, self.n, {K: c * C for K, C in self.terms.items()})

    def _check_compatible(self, other):
        if (self.d, self.n) != (other.d, other.n):
            raise ValueError(f"incompatible polynomials: (d, n) = {(self.d, self.n)} vs {(other.d, other.n)}")


def random_polynomial(d: int, n: int, max_degree: int, rng: np.random.Generator,
                      density: float = 1.0) -> MatrixPolynomial:
    """Gaussian complex coefficients on a random subset of monomials of degree <= max_degree.

    Never returns the zero polynomial.
    """
    monos = [K for K in product(range(max_degree + 1), repeat=d) if sum(K) <= max_degree]
    keep = [K for K in monos if rng.random() < density] or [monos[rng.integers(len(monos))]]
    terms = {
        K: rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) for K in keep
    }
    return MatrixPolynomial(d, n, terms)


def op_norm(A) -> float:
    """Largest singular value."""
    A = np.asarray(A)
    if not np.all(np.isfinite(A)):
        raise DomainError("matrix has non-finite entries")
    if A.size == 0:
        return 0.0
    return float(np.linalg.svd(A, compute_uv=False)[0])


def eval_at_point(p: MatrixPolynomial, z: Sequence[complex]) -> np.ndarray:
    z = np.asarray(z, dtype=np.complex128)
    if z.shape != (p.d,):
        raise ValueError(f"point has shape {z.shape}, expected ({p.d},)")
    out = np.zeros((p.n, p.n), dtype=np.complex128)
    for K, C in p.terms.items():
        out += C * np.prod(z ** np.asarray(K))
    return out


def eval_at_matrices(p: MatrixPolynomial, mats: Sequence[np.ndarray]) -> np.ndarray:
    """``sum_K coeff_K (x) A^K`` for a commuting tuple of square matrices."""
    if len(mats) != p.d:
        raise ValueError(f"polynomial in {p.d} variables applied to {len(mats)} matrices")
    D = mats[0].shape[0]
    out = np.zeros((p.n * D, p.n * D), dtype=np.complex128)
    for K, C in p.terms.items():
        out += np.kron(C, monomial(mats, K))
    return out


def eval_at_tuple(p: MatrixPolynomial, T: TruncatedShift) -> np.ndarray:
    """``p(T)`` as an ``n x n`` block matrix of ``dim x dim`` blocks."""
    if p.d != T.d:
        raise ValueError(f"polynomial in {p.d} variables applied to a {T.d}-variable shift")
    D = T.dim
    out = np.zeros((p.n * D, p.n * D), dtype=np.complex128)
    for K, C in p.terms.items():
        if sum(K) <= T.N + 1 and np.any(C != 0):
            out += np.kron(C, apply_monomial(T, K))
    return out


@dataclass(frozen=True)
class TorusSup:
    value: float
    argmax: tuple[float, ...]  # angles in [0, 2 pi)
    uncertainty: float
    grid_value: float
    grid_per_axis: int
    lipschitz: float
    refined: bool

    @property
    def upper(self) -> float:
        return self.value + self.uncertainty

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "argmax_angles": list(self.argmax),
            "uncertainty": self.uncertainty,
            "upper_bound": self.upper,
            "grid_value": self.grid_value,
            "grid_per_axis": self.grid_per_axis,
            "lipschitz": self.lipschitz,
            "refined": self.refined,
        }


TIE_TOL = 1e-13


def _norm_at_angles(p: MatrixPolynomial, theta: np.ndarray) -> float:
    return op_norm(eval_at_point(p, np.exp(1j * theta)))


def _refine(p: MatrixPolynomial, theta: np.ndarray, value: float, half_width: float,
            sweeps: int = 4) -> tuple[np.ndarray, float]:
    """Coordinate-wise bounded scalar maximization around ``theta``."""
    theta = theta.copy()
    for _ in range(sweeps):
        improved = False
        for ax in range(p.d):
            def neg(x, ax=ax):
                th = theta.copy()
                th[ax] = x
                return -_norm_at_angles(p, th)

            c = theta[ax]
            res = minimize_scalar(neg, bounds=(c - half_width, c + half_width),
                                  method="bounded", options={"xatol": 1e-12})
            if -res.fun > value + 1e-15:
                theta[ax] = res.x
                value = -res.fun
                improved = True
        if not improved:
            break
    return np.mod(theta, 2 * np.pi), value


def sup_norm_torus(p: MatrixPolynomial, grid_per_axis: int = 64, refine: bool = True,
                   backend: str | None = None) -> TorusSup:
    """``sup ||p(z)||`` over the torus, with a rigorous upper bound.

    The torus suffices because it is the distinguished boundary of the
    polydisc.  Every grid point lies within ``pi / m`` (per angle) of the
    true maximizer, so ``grid max + L pi / m`` bounds the sup from above;
    ``uncertainty`` is that bound minus the reported (attained) value.
    """
    m = int(grid_per_axis)
    if m < 4:
        raise ValueError(f"grid_per_axis must be >= 4, got {m}")
    L = p.lipschitz_constant()
    if p.degree <= 0:
        C = p.terms.get((0,) * p.d, np.zeros((p.n, p.n)))
        v = op_norm(C)
        return TorusSup(v, (0.0,) * p.d, 0.0, v, m, L, False)

    vals = _kernels.grid_norms(p.coeff_array(), p.exponent_array(), m, backend=backend)
    grid_max = float(vals.max())
    best = int(np.flatnonzero(vals >= grid_max - TIE_TOL)[0])
    digits = np.array(np.unravel_index(best, (m,) * p.d), dtype=float)
    theta = 2 * np.pi * digits / m
    value = grid_max
    if refine:
        theta, value = _refine(p, theta, value, half_width=2 * np.pi / m)
    bound = grid_max + L * np.pi / m
    return TorusSup(value, tuple(float(t) for t in theta), max(0.0, bound - value),
                    grid_max, m, L, refine)


@dataclass(frozen=True)
class VNReport:
    norm: float
    sup: TorusSup
    tol: float

    @property
    def ratio(self) -> float:
        return self.norm / self.sup.value

    @property
    def verdict(self) -> str:
        """``violated`` only when the norm exceeds the rigorous upper bound."""
        if self.norm > self.sup.upper + self.tol:
            return "violated"
        if self.norm <= self.sup.value + self.tol:
            return "holds"
        return "inconclusive"

    def to_dict(self) -> dict:
        return {
            "norm_p_of_T": self.norm,
            "sup_norm": self.sup.to_dict(),
            "ratio": self.ratio,
            "slack_ratio": self.sup.uncertainty / self.sup.value,
            "verdict": self.verdict,
            "tol": self.tol,
        }


def vn_check(p: MatrixPolynomial, T: TruncatedShift, grid_per_axis: int = 64,
             refine: bool = True, tol: float = 1e-10, backend: str | None = None,
             max_grid: int | None = None) -> VNReport:
    """Compare ``||p(T)||`` with the torus sup-norm of ``p``.

    With ``max_grid`` set, an inconclusive result is retried on doubled grids
    (up to ``max_grid`` points per axis) until the bound decides it.
    """
    if p.is_zero():
        raise DomainError("zero polynomial: von Neumann ratio undefined")
    norm = op_norm(eval_at_tuple(p, T))
    m = grid_per_axis
    while True:
        sup = sup_norm_torus(p, m, refine, backend=backend)
        if sup.value == 0:
            raise DomainError("polynomial vanishes on the torus")
        report = VNReport(norm, sup, tol)
        if report.verdict != "inconclusive" or max_grid is None or 2 * m > max_grid:
            return report
        m *= 2


def vn_ratio(p: MatrixPolynomial, T: TruncatedShift, grid_per_axis: int = 64,
             refine: bool = True) -> float:
    """``||p(T)|| / sup_{torus} ||p||``."""
    return vn_check(p, T, grid_per_axis, refine).ratio


def default_grid(d: int) -> int:
    """Grid size keeping ``m**d`` near 64**3 points."""
    return 64 if d <= 3 else max(8, int(math.floor(64 ** (3 / d))))
