from itertools import product

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from shiftlab.errors import DomainError
from shiftlab.parrott import ParrottConfig, build_family, parrott_polynomial
from shiftlab.shiftbuild import build
from shiftlab.vncheck import (
    MatrixPolynomial,
    eval_at_point,
    eval_at_tuple,
    op_norm,
    random_polynomial,
    sup_norm_torus,
    vn_check,
    vn_ratio,
)
from shiftlab.weights import WeightFamily, random_contractive_family


def brute_grid_max(p, m):
    """Max of ||p|| over the m-point torus grid by direct evaluation."""
    best = 0.0
    for k in product(range(m), repeat=p.d):
        z = np.exp(2j * np.pi * np.array(k) / m)
        best = max(best, np.linalg.svd(eval_at_point(p, z), compute_uv=False)[0])
    return best


def test_eval_at_point_examples():
    p = MatrixPolynomial.variable(3, 1)
    assert eval_at_point(p, [0.3, 0.1, 0.2])[0, 0] == pytest.approx(0.3)
    C = np.array([[1, 2j], [3, 4]])
    q = MatrixPolynomial.constant(2, C)
    assert np.array_equal(eval_at_point(q, [0.7, -1j]), C)
    assert not np.any(eval_at_point(parrott_polynomial(), [0, 0, 0]))


def test_parrott_at_ones_has_norm_sqrt3():
    P = eval_at_point(parrott_polynomial(), [1, 1, 1])
    assert np.array_equal(P.real, [[1, 1, 0], [1, 0, 1], [0, 1, -1]])
    # oracle: exact characteristic polynomial of the symmetric matrix
    lam = sympy.symbols("lam")
    charpoly = sympy.Matrix([[1, 1, 0], [1, 0, 1], [0, 1, -1]]).charpoly(lam).as_expr()
    assert sympy.expand(charpoly - (lam**3 - 3 * lam)) == 0
    assert op_norm(P) == pytest.approx(np.sqrt(3), abs=1e-14)


def test_eval_at_tuple_variable_and_nilpotency():
    T = build(random_contractive_family(2, 1, seed=0))
    assert np.array_equal(eval_at_tuple(MatrixPolynomial.variable(2, 2), T), T[2])
    high = MatrixPolynomial.scalar(2, {(0, 0): 2.0, (2, 1): 5.0, (0, 3): 1.0})
    assert np.array_equal(eval_at_tuple(high, T), 2 * np.eye(T.dim))


def test_eval_at_tuple_block_layout():
    T = build(random_contractive_family(2, 1, seed=0))
    C = np.array([[1.0, 2.0], [3.0, 4.0]])
    P = eval_at_tuple(MatrixPolynomial(2, 2, {(1, 0): C}), T)
    D = T.dim
    for a, b in product(range(2), repeat=2):
        assert np.array_equal(P[a * D:(a + 1) * D, b * D:(b + 1) * D], C[a, b] * T[1])


def test_op_norm():
    assert op_norm([[-1, 1, 0], [1, 0, 1], [0, 1, -1]]) == pytest.approx(2, abs=1e-14)
    assert op_norm(np.eye(4)) == 1
    assert op_norm(np.diag([0.2, -0.9j, 0.5])) == pytest.approx(0.9)
    with pytest.raises(DomainError):
        op_norm([[np.nan]])


def test_sup_of_coordinate():
    for m in (4, 7, 64):
        s = sup_norm_torus(MatrixPolynomial.variable(2, 1), m)
        assert s.value == 1.0 and s.grid_value == 1.0


def test_sup_of_z1z2_plus_one():
    p = MatrixPolynomial.scalar(2, {(1, 1): 1, (0, 0): 1})
    s = sup_norm_torus(p, 64)
    assert brute_grid_max(p, 64) == pytest.approx(2.0, abs=1e-14)
    assert s.value == pytest.approx(2.0, abs=1e-14)
    assert s.argmax == (0.0, 0.0)


def test_sup_of_parrott_polynomial():
    s = sup_norm_torus(parrott_polynomial(), 32)
    assert s.value == pytest.approx(np.sqrt(3), abs=1e-12)
    assert s.value <= np.sqrt(3) + 1e-12 <= s.upper


@pytest.mark.parametrize("seed", range(4))
@pytest.mark.parametrize("n", [1, 2, 3])
def test_grid_matches_direct_evaluation(seed, n):
    rng = np.random.default_rng(seed)
    p = random_polynomial(2, n, 3, rng)
    s = sup_norm_torus(p, 12, refine=False)
    assert s.grid_value == pytest.approx(brute_grid_max(p, 12), rel=1e-12)


@pytest.mark.parametrize("seed", range(4))
def test_uncertainty_brackets_fine_grid(seed):
    rng = np.random.default_rng(seed)
    p = random_polynomial(2, 2, 3, rng)
    coarse = sup_norm_torus(p, 16, refine=True)
    fine = brute_grid_max(p, 96)
    # both grids give rigorous brackets of the same true sup
    assert coarse.value <= fine + p.lipschitz_constant() * np.pi / 96 + 1e-12
    assert fine <= coarse.upper + 1e-12
    assert coarse.value >= coarse.grid_value


@pytest.mark.parametrize("seed", range(4))
def test_sup_monotone_under_grid_doubling(seed):
    rng = np.random.default_rng(seed)
    p = random_polynomial(3, 1, 3, rng)
    vals = [sup_norm_torus(p, m, refine=False).grid_value for m in (4, 8, 16, 32)]
    assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))


def test_refinement_never_decreases():
    rng = np.random.default_rng(5)
    for _ in range(5):
        p = random_polynomial(2, 2, 3, rng)
        a = sup_norm_torus(p, 8, refine=False)
        b = sup_norm_torus(p, 8, refine=True)
        assert b.value >= a.value
        assert b.upper == pytest.approx(a.upper)


@given(st.integers(0, 2**32 - 1))
def test_evaluation_is_multiplicative(seed):
    rng = np.random.default_rng(seed)
    T = build(random_contractive_family(2, 2, seed=rng, profile="complex-nonzero"))
    p = random_polynomial(2, 1, 2, rng)
    q = random_polynomial(2, 1, 2, rng)
    lhs = eval_at_tuple(p * q, T)
    rhs = eval_at_tuple(p, T) @ eval_at_tuple(q, T)
    assert np.abs(lhs - rhs).max() <= 1e-11 * max(1.0, np.abs(rhs).max())


def test_ratio_of_coordinate_is_max_weight():
    W = random_contractive_family(3, 2, seed=13)
    r = vn_ratio(MatrixPolynomial.variable(3, 1), build(W))
    assert r == pytest.approx(np.abs(W.w[:, 0]).max(), rel=1e-12)
    assert r <= 1


def test_random_shifts_satisfy_inequality():
    rng = np.random.default_rng(100)
    worst = 0.0
    for _ in range(100):
        T = build(random_contractive_family(3, 3, seed=rng))
        p = random_polynomial(3, 1, 3, rng, density=0.5)
        worst = max(worst, vn_ratio(p, T, grid_per_axis=32))
    assert worst <= 1 + 1e-6


def test_zero_polynomial_rejected():
    T = build(WeightFamily.constant(2, 1))
    with pytest.raises(DomainError):
        vn_check(MatrixPolynomial.scalar(2, {(1, 0): 0.0}), T)


def test_constant_polynomial_ratio_one():
    T = build(WeightFamily.constant(2, 1))
    rep = vn_check(MatrixPolynomial.constant(2, [[2.0, 0], [0, -1j]]), T)
    assert rep.ratio == pytest.approx(1.0) and rep.verdict == "holds"


def test_polynomial_validation():
    with pytest.raises(ValueError):
        MatrixPolynomial.scalar(2, {(1, 0, 0): 1.0})
    with pytest.raises(ValueError):
        sup_norm_torus(MatrixPolynomial.variable(1, 1), 3)
    p = MatrixPolynomial.scalar(2, {(1, 0): 1.0}) + MatrixPolynomial.scalar(2, {(1, 0): -1.0})
    assert p.is_zero() and p.degree == -1


def test_inconclusive_resolved_by_doubling():
    T = build(build_family(ParrottConfig.counterexample()))
    p = parrott_polynomial()
    assert vn_check(p, T, grid_per_axis=16).verdict == "inconclusive"
    rep = vn_check(p, T, grid_per_axis=16, max_grid=64)
    assert rep.verdict == "violated" and rep.sup.grid_per_axis == 64
    # the cap is respected
    assert vn_check(p, T, grid_per_axis=16, max_grid=31).sup.grid_per_axis == 16
