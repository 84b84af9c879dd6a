"""Good/bad indices, scalable pairs and the push of a family to the boundary set.

A family is pushed towards ``X_0`` (all weights of modulus one) by scaling
the scalable weights with ``t`` on the circle ``|t| = r``, choosing ``t`` to
maximize the modulus of an analytic functional of the family.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import CommutationError, DomainError
from .multiindex import MultiIndex, enumerate_basis, predecessors
from .shiftbuild import build
from .vncheck import MatrixPolynomial, eval_at_tuple
from .weights import DEFAULT_TOL, UNIMODULAR_TOL, WeightFamily, require_commuting

DEFAULT_SAMPLES = 720
TIE_TOL = 1e-13


@dataclass(frozen=True, eq=False)
class BoundaryState:
    W: WeightFamily
    good_mask: np.ndarray = field(repr=False)      # over the basis of H_{N+1}
    scalable_mask: np.ndarray = field(repr=False)  # shape of W.w
    r: float

    @property
    def good(self) -> frozenset[MultiIndex]:
        basis = enumerate_basis(self.W.d, self.W.N + 1)
        return frozenset(basis.unrank(int(k)) for k in np.flatnonzero(self.good_mask))

    @property
    def bad(self) -> frozenset[MultiIndex]:
        basis = enumerate_basis(self.W.d, self.W.N + 1)
        return frozenset(basis.unrank(int(k)) for k in np.flatnonzero(~self.good_mask))

    @property
    def scalable(self) -> frozenset[tuple[MultiIndex, int]]:
        return frozenset(
            (self.W.basis.unrank(int(k)), int(j) + 1) for k, j in np.argwhere(self.scalable_mask)
        )

    def to_dict(self) -> dict:
        return {
            "good": sorted(list(I) for I in self.good),
            "scalable": sorted([list(I), j] for I, j in self.scalable),
            "r": None if np.isinf(self.r) else self.r,
        }


def _require_interior_input(W: WeightFamily, tol: float) -> None:
    if not W.injective:
        raise DomainError("family has zero weights; it is not a point of X with nonzero weights")
    if not W.is_contractive(tol):
        raise DomainError("family is not contractive")


def classify(W: WeightFamily, tol: float = UNIMODULAR_TOL,
             commute_tol: float = DEFAULT_TOL) -> BoundaryState:
    """Split ``{|I| <= N + 1}`` into good indices (``||T^I e_0|| = 1``) and bad ones.

    ``I`` is good when some predecessor ``J = I - e_j`` is good and
    ``|w_{J,j}| = 1``.  For a commuting family this agrees with requiring it
    of every predecessor; disagreement is reported as a commutation error.
    """
    _require_interior_input(W, tol)
    require_commuting(W, commute_tol)
    outer = enumerate_basis(W.d, W.N + 1)
    inner = W.basis
    unimod = W.unimodular_mask(tol)
    good = np.zeros(outer.size, dtype=bool)
    good[0] = True
    for k in range(1, outer.size):
        flags = [good[inner.rank(J)] and unimod[inner.rank(J), j - 1]
                 for J, j in predecessors(outer.unrank(k))]
        if any(flags) != all(flags):
            raise CommutationError(
                f"path moduli to I={list(outer.unrank(k))} disagree; family is not commuting"
            )
        good[k] = flags[0]
    succ = outer.successors[: inner.size]
    scal = good[: inner.size, None] & ~good[succ]
    r = float(1.0 / np.abs(W.w[scal]).max()) if scal.any() else float("inf")
    good.setflags(write=False)
    scal.setflags(write=False)
    return BoundaryState(W, good, scal, r)


def scale_step(S: BoundaryState, t: complex) -> WeightFamily:
    """Multiply every scalable weight by ``t`` (requires ``|t| <= r``)."""
    if abs(t) > S.r * (1 + 1e-12):
        raise ValueError(f"|t| = {abs(t):.6g} exceeds the scaling radius r = {S.r:.6g}")
    return S.W.replace(np.where(S.scalable_mask, t * S.W.w, S.W.w))


@dataclass(frozen=True, eq=False)
class Functional:
    """``w -> <p(T(w)) g, h>`` with ``g``, ``h`` stored as ``(n, dim H_{N+1})`` blocks."""

    p: MatrixPolynomial
    g: np.ndarray = field(repr=False)
    h: np.ndarray = field(repr=False)

    def __call__(self, W: WeightFamily) -> complex:
        return complex(np.vdot(self.h.ravel(), eval_at_tuple(self.p, build(W)) @ self.g.ravel()))

    def on_circle(self, S: BoundaryState, ts, backend: str | None = None) -> np.ndarray:
        W = S.W
        succ = enumerate_basis(W.d, W.N + 1).successors[: W.basis.size]
        return _kernels.circle_functional(
            W.w, S.scalable_mask, ts, succ, self.p.coeff_array(), self.p.exponent_array(),
            self.g, self.h, backend=backend,
        )

    def to_dict(self) -> dict:
        return {"n": self.p.n, "degree": self.p.degree}


def unit_functional(d: int, N: int) -> Functional:
    """The constant functional ``f = 1`` (``p = 1``, ``g = h = e_0``)."""
    D = enumerate_basis(d, N + 1).size
    e0 = np.zeros((1, D), dtype=np.complex128)
    e0[0, 0] = 1.0
    return Functional(MatrixPolynomial.constant(d, [[1.0]]), e0, e0)


def random_functional(d: int, N: int, p: MatrixPolynomial, rng: np.random.Generator) -> Functional:
    """Random unit vectors ``g``, ``h`` for a given polynomial."""
    D = enumerate_basis(d, N + 1).size

    def unit():
        v = rng.standard_normal((p.n, D)) + 1j * rng.standard_normal((p.n, D))
        return v / np.linalg.norm(v)

    return Functional(p, unit(), unit())


@dataclass(frozen=True)
class PushStep:
    scalable: tuple[tuple[MultiIndex, int], ...]
    r: float
    t0: complex
    f_before: float
    f_after: float
    slack: float
    new_unimodular: tuple[tuple[MultiIndex, int], ...]

    def to_dict(self) -> dict:
        return {
            "scalable": [[list(I), j] for I, j in self.scalable],
            "r": self.r,
            "t0": [self.t0.real, self.t0.imag],
            "abs_f_before": self.f_before,
            "abs_f_after": self.f_after,
            "slack": self.slack,
            "new_unimodular": [[list(I), j] for I, j in self.new_unimodular],
        }


@dataclass(frozen=True, eq=False)
class PushResult:
    path: tuple[WeightFamily, ...] = field(repr=False)
    steps: tuple[PushStep, ...]
    circle_samples: int

    @property
    def final(self) -> WeightFamily:
        return self.path[-1]

    @property
    def f_values(self) -> list[float]:
        if not self.steps:
            return []
        return [self.steps[0].f_before] + [s.f_after for s in self.steps]

    @property
    def total_slack(self) -> float:
        return float(sum(s.slack for s in self.steps))

    def to_dict(self) -> dict:
        return {
            "circle_samples": self.circle_samples,
            "n_steps": len(self.steps),
            "total_slack": self.total_slack,
            "abs_f": self.f_values,
            "final_in_boundary": self.final.in_boundary(),
            "steps": [s.to_dict() for s in self.steps],
        }


def _pairs(W: WeightFamily, mask: np.ndarray) -> tuple[tuple[MultiIndex, int], ...]:
    return tuple((W.basis.unrank(int(k)), int(j) + 1) for k, j in np.argwhere(mask))


def push_to_boundary(W: WeightFamily, f: Functional | None = None,
                     circle_samples: int = DEFAULT_SAMPLES, tol: float = UNIMODULAR_TOL,
                     backend: str | None = None) -> PushResult:
    """Iterate scale steps until every weight has modulus one.

    Each step evaluates ``|f|`` at ``circle_samples`` equispaced points of
    ``|t| = r`` and moves to the best one (ties: smallest argument).  When
    the best sample falls below ``|f|`` at the current point, the shortfall
    is recorded as slack rather than hidden.  Each step strictly enlarges
    the set of unimodular weights, so at most ``d * dim H_N`` steps occur.
    """
    if circle_samples < 1:
        raise ValueError("circle_samples must be positive")
    if f is None:
        f = unit_functional(W.d, W.N)
    _require_interior_input(W, tol)
    max_steps = W.w.size
    angles = np.exp(2j * np.pi * np.arange(circle_samples) / circle_samples)
    path = [W]
    steps: list[PushStep] = []
    while True:
        S = classify(W, tol)
        if not S.scalable_mask.any():
            if not W.in_boundary(tol):
                raise AssertionError("no scalable pair but family is off the boundary")
            break
        if len(steps) >= max_steps:
            raise AssertionError(f"push did not terminate within {max_steps} steps")
        f_before = abs(f.on_circle(S, [1.0], backend=backend)[0])
        ts = S.r * angles
        vals = np.abs(f.on_circle(S, ts, backend=backend))
        best = int(np.flatnonzero(vals >= vals.max() - TIE_TOL)[0])
        t0 = complex(ts[best])
        W_new = scale_step(S, t0)
        old = W.unimodular_mask(tol)
        new = W_new.unimodular_mask(tol)
        if not (np.all(new[old]) and new.sum() > old.sum()):
            raise AssertionError("unimodular set did not grow strictly")
        steps.append(PushStep(
            scalable=_pairs(W, S.scalable_mask),
            r=S.r,
            t0=t0,
            f_before=float(f_before),
            f_after=float(vals[best]),
            slack=float(max(0.0, f_before - vals[best])),
            new_unimodular=_pairs(W, new & ~old),
        ))
        W = W_new
        path.append(W)
    return PushResult(tuple(path), tuple(steps), circle_samples)
