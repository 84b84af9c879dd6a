"""Diagonal unitary gauge taking a nonzero-weight shift to its modulus shift."""
from __future__ import annotations

import numpy as np

from .errors import CommutationError, DomainError
from .multiindex import enumerate_basis, predecessors
from .shiftbuild import build
from .vncheck import MatrixPolynomial, eval_at_tuple, op_norm
from .weights import WeightFamily

PATH_TOL = 1e-12


def gauge_phases(W: WeightFamily, tol: float = PATH_TOL) -> tuple[np.ndarray, float]:
    """Phases ``lambda_I`` on the level ``N + 1`` basis and the path residual.

    ``lambda_0 = 1`` and ``lambda_{I+e_j} = lambda_I w_{I,j} / |w_{I,j}|``,
    defined through the lexicographically smallest predecessor.  The other
    predecessors must agree within ``tol``; the largest disagreement is
    returned as the path residual.
    """
    if not W.injective:
        raise DomainError(
            "family has zero weights; phase normalization needs an injective shift "
            "(zero-weight shifts are not unitarily equivalent to their modulus shift in general)"
        )
    outer = enumerate_basis(W.d, W.N + 1)
    inner = W.basis
    phase = W.w / np.abs(W.w)
    lam = np.empty(outer.size, dtype=np.complex128)
    lam[0] = 1.0
    residual = 0.0
    for k in range(1, outer.size):
        I = outer.unrank(k)
        cands = [lam[inner.rank(J)] * phase[inner.rank(J), j - 1] for J, j in predecessors(I)]
        lam[k] = cands[0]
        for c in cands[1:]:
            residual = max(residual, abs(c - cands[0]))
    if residual > tol:
        raise CommutationError(f"gauge is path dependent (residual {residual:.3g} > {tol:g})")
    return lam, residual


def phase_normalize(W: WeightFamily, tol: float = PATH_TOL) -> tuple[WeightFamily, np.ndarray]:
    """Return ``(|W|, lambda)`` with ``U* T_j(W) U = T_j(|W|)`` for ``U = diag(lambda)``."""
    lam, _ = gauge_phases(W, tol)
    return W.modulus(), lam


def gauge_norm_invariance_check(W: WeightFamily, p: MatrixPolynomial) -> float:
    """``| ||p(T(W))|| - ||p(T(|W|))|| |``; zero up to rounding for injective ``W``."""
    Wabs, _ = phase_normalize(W)
    return abs(op_norm(eval_at_tuple(p, build(W))) - op_norm(eval_at_tuple(p, build(Wabs))))
