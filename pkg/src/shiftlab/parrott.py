"""A zero-weight 3-variable shift that fails the matrix von Neumann inequality.

Weights (``d = 3``, ``N = 2``): ``delta_j`` at the origin, ``a_{i,j}`` at
``e_i`` for ``i != j``, and zero at ``e_j`` in direction ``j`` and on every
``|I| >= 2``.  With ``a_{2,1} = -1`` and the other ``a`` equal to one, the
matrix polynomial

    p = [[z1, z2, 0], [z3, 0, z2], [0, z3, -z1]]

has sup-norm ``sqrt(3)`` on the polydisc, while ``||p(T)|| = 2``.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.linalg import null_space

from .errors import DomainError
from .shiftbuild import build
from .vncheck import MatrixPolynomial, TorusSup, eval_at_matrices, eval_at_tuple, op_norm, sup_norm_torus
from .weights import WeightFamily, validate_commuting

PAIRS = ((1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2))
# relations delta_i a_{i,j} = delta_j a_{j,i}, one per unordered pair
RELATIONS = ((1, 3), (2, 1), (3, 2))

# basis of the 6-dimensional space carrying the tuple: first layer, then second
FIRST_LAYER = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
SECOND_LAYER = ((1, 1, 0), (1, 0, 1), (0, 1, 1))

# 1-based rows/columns of the 9x9 matrix p(A1, A2, A3) holding the norm-2 witness
WITNESS_ROWS = (1, 6, 8)
WITNESS_COLS = (2, 4, 9)
WITNESS = np.array([[-1, 1, 0], [1, 0, 1], [0, 1, -1]], dtype=float)

UNIMOD_TOL = 1e-12
RELATION_TOL = 1e-12


@dataclass(frozen=True)
class ParrottConfig:
    a: Mapping[tuple[int, int], complex]
    delta: tuple[complex, complex, complex] = (0, 0, 0)

    def __post_init__(self):
        a = {tuple(k): complex(v) for k, v in dict(self.a).items()}
        if set(a) != set(PAIRS):
            raise ValueError(f"need a_(i,j) for exactly the pairs {PAIRS}")
        for k, v in a.items():
            if abs(abs(v) - 1) > UNIMOD_TOL:
                raise DomainError(f"a{k} = {v} is not of modulus 1")
        delta = tuple(complex(x) for x in self.delta)
        if len(delta) != 3:
            raise ValueError("delta must have three entries")
        if any(abs(x) > 1 + UNIMOD_TOL for x in delta):
            raise DomainError(f"delta {delta} has an entry of modulus > 1")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "delta", delta)

    @classmethod
    def counterexample(cls) -> "ParrottConfig":
        a = {k: 1.0 for k in PAIRS}
        a[(2, 1)] = -1.0
        return cls(a)

    @classmethod
    def all_ones(cls, delta=(0, 0, 0)) -> "ParrottConfig":
        return cls({k: 1.0 for k in PAIRS}, tuple(delta))

    def with_delta(self, delta) -> "ParrottConfig":
        c = ParrottConfig(self.a, tuple(delta))
        check_config(c)
        return c

    def relation_residuals(self) -> dict[str, float]:
        a, dl = self.a, self.delta
        out = {}
        for i, j in RELATIONS:
            out[f"delta{i} a{i}{j} = delta{j} a{j}{i}"] = abs(
                dl[i - 1] * a[(i, j)] - dl[j - 1] * a[(j, i)])
        return out

    def product_residual(self) -> float:
        a = self.a
        return abs(a[(1, 3)] * a[(2, 1)] * a[(3, 2)] - a[(3, 1)] * a[(1, 2)] * a[(2, 3)])

    def to_dict(self) -> dict:
        return {
            "a": {f"{i}{j}": [v.real, v.imag] for (i, j), v in sorted(self.a.items())},
            "delta": [[x.real, x.imag] for x in self.delta],
        }


def check_config(c: ParrottConfig) -> None:
    """Raise :class:`DomainError` naming the first failed consistency relation."""
    nonzero = [abs(x) > 0 for x in c.delta]
    if not any(nonzero):
        return
    if not all(nonzero):
        raise DomainError("if one delta_j is nonzero then all of them must be nonzero")
    if c.product_residual() > RELATION_TOL:
        raise DomainError(
            "a13 a21 a32 = a31 a12 a23 fails "
            f"(residual {c.product_residual():.3g}); delta must vanish"
        )
    for name, res in c.relation_residuals().items():
        if res > RELATION_TOL:
            raise DomainError(f"relation {name} fails (residual {res:.3g})")


def build_family(c: ParrottConfig) -> WeightFamily:
    check_config(c)
    entries = {}
    W0 = WeightFamily.constant(3, 2, 0.0)
    for (I, j), _ in W0.entries():
        if sum(I) == 0:
            val = c.delta[j - 1]
        elif sum(I) == 1:
            i = I.index(1) + 1
            val = 0.0 if i == j else c.a[(i, j)]
        else:
            val = 0.0
        entries[(I, j)] = val
    W = WeightFamily.from_entries(3, 2, entries)
    report = validate_commuting(W, RELATION_TOL)
    if not report.ok:  # unreachable after check_config
        raise DomainError(f"commutation fails: {report.to_dict()['violations'][0]}")
    return W


def compression_matrices(c: ParrottConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``A_j`` with ``T_j = [[0, 0], [A_j, 0]]`` on the first two layers.

    ``A_j[r, s]`` is the coefficient of the ``r``-th second-layer vector in
    ``T_j`` applied to the ``s``-th first-layer vector.
    """
    if any(abs(x) > 0 for x in c.delta):
        raise DomainError("compression to the two middle layers needs delta = 0")
    A = [np.zeros((3, 3), dtype=np.complex128) for _ in range(3)]
    for (i, j), v in c.a.items():
        src = FIRST_LAYER.index(FIRST_LAYER[i - 1])
        target = list(FIRST_LAYER[i - 1])
        target[j - 1] += 1
        A[j - 1][SECOND_LAYER.index(tuple(target)), src] = v
    return A[0], A[1], A[2]


def middle_layer_tuple(c: ParrottConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The 6x6 block matrices ``[[0, 0], [A_j, 0]]``."""
    out = []
    for A in compression_matrices(c):
        T = np.zeros((6, 6), dtype=np.complex128)
        T[3:, :3] = A
        out.append(T)
    return tuple(out)


def parrott_polynomial() -> MatrixPolynomial:
    E = lambda r, s: np.eye(1, 9, 3 * r + s).reshape(3, 3)  # noqa: E731
    return MatrixPolynomial(3, 3, {
        (1, 0, 0): E(0, 0) - E(2, 2),
        (0, 1, 0): E(0, 1) + E(1, 2),
        (0, 0, 1): E(1, 0) + E(2, 1),
    })


def witness_submatrix(P9: np.ndarray) -> np.ndarray:
    rows = [r - 1 for r in WITNESS_ROWS]
    cols = [c - 1 for c in WITNESS_COLS]
    return P9[np.ix_(rows, cols)]


def solve_delta(a: Mapping[tuple[int, int], complex], tol: float = 1e-10) -> np.ndarray:
    """Basis (columns) of all ``delta`` solving the three linear relations."""
    R = np.zeros((3, 3), dtype=np.complex128)
    for row, (i, j) in enumerate(RELATIONS):
        R[row, i - 1] += a[(i, j)]
        R[row, j - 1] -= a[(j, i)]
    return null_space(R, rcond=tol)


@dataclass(frozen=True, eq=False)
class RefutationReport:
    """With nonzero delta there is no compression, so ``norm_compressed``
    falls back to the full-shift norm and the witness fields are ``None``."""

    config: ParrottConfig
    norm_compressed: float
    norm_full: float
    witness: np.ndarray | None = field(repr=False)
    witness_norm: float | None
    sup: TorusSup
    elapsed: float

    @property
    def ratio(self) -> float:
        return self.norm_compressed / self.sup.value

    @property
    def verdict(self) -> str:
        if self.norm_compressed > self.sup.upper + 1e-10:
            return "violated"
        if self.norm_compressed <= self.sup.value + 1e-10:
            return "holds"
        return "inconclusive"

    @property
    def conclusion(self) -> str:
        if self.verdict == "violated":
            return "matrix von Neumann inequality fails; no commuting unitary dilation exists"
        return "no obstruction found"

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "norm_p_of_A": self.norm_compressed,
            "norm_p_of_T": self.norm_full,
            "witness_rows": list(WITNESS_ROWS) if self.witness is not None else None,
            "witness_cols": list(WITNESS_COLS) if self.witness is not None else None,
            "witness": self.witness.real.tolist() if self.witness is not None else None,
            "witness_norm": self.witness_norm,
            "sup_norm": self.sup.to_dict(),
            "ratio": self.ratio,
            "verdict": self.verdict,
            "conclusion": self.conclusion,
            "elapsed_seconds": self.elapsed,
        }


def refutation_report(config: ParrottConfig | None = None, grid_per_axis: int = 64,
                      refine: bool = True) -> RefutationReport:
    """Norm of ``p`` on the 6-dimensional compression and on the full shift,
    against the torus sup-norm of ``p``."""
    start = time.perf_counter()
    c = config or ParrottConfig.counterexample()
    p = parrott_polynomial()
    T = build(build_family(c))
    norm_full = op_norm(eval_at_tuple(p, T))
    if any(c.delta):
        norm_small, wit, wit_norm = norm_full, None, None
    else:
        P9 = eval_at_matrices(p, compression_matrices(c))
        norm_small = op_norm(P9)
        if abs(norm_full - norm_small) > 1e-9:
            raise AssertionError(f"full shift norm {norm_full} differs from compressed norm {norm_small}")
        wit = witness_submatrix(P9)
        wit_norm = op_norm(wit)
    sup = sup_norm_torus(p, grid_per_axis, refine)
    return RefutationReport(c, norm_small, norm_full, wit, wit_norm, sup,
                            time.perf_counter() - start)
