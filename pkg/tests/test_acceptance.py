"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""
import time

import numpy as np
import pytest

from conftest import half_example
from shiftlab.boundary import classify, push_to_boundary, random_functional, scale_step
from shiftlab.dilation import brehmer_defect, build_cyclic_dilation
from shiftlab.normalize import gauge_norm_invariance_check, gauge_phases
from shiftlab.parrott import (
    ParrottConfig,
    build_family,
    compression_matrices,
    parrott_polynomial,
    solve_delta,
    witness_submatrix,
)
from shiftlab.shiftbuild import build
from shiftlab.vncheck import (
    eval_at_matrices,
    op_norm,
    random_polynomial,
    sup_norm_torus,
    vn_check,
)
from shiftlab.weights import random_contractive_family, validate_commuting

pytestmark = pytest.mark.acceptance

SQRT3 = np.sqrt(3.0)
# two SVD routes for the same norm can differ by a few ulp at equality (constant p)
ROUNDING = 1e-12


def detail(node, text):
    node._criterion_detail = text


def test_counterexample_norm(criterion):
    node = criterion(1, "||p(A)|| = 2 and the 3x3 witness")
    start = time.perf_counter()
    P9 = eval_at_matrices(parrott_polynomial(), compression_matrices(ParrottConfig.counterexample()))
    norm = op_norm(P9)
    W = witness_submatrix(P9)
    elapsed = time.perf_counter() - start
    detail(node, f"norm={norm:.12f}, witness norm={op_norm(W):.12f}, {elapsed:.3f}s")
    assert abs(norm - 2) <= 1e-9
    assert np.array_equal(W, np.array([[-1, 1, 0], [1, 0, 1], [0, 1, -1]]))
    assert abs(op_norm(W) - 2) <= 1e-12
    assert elapsed < 1.0


def test_counterexample_sup_norm(criterion):
    node = criterion(2, "torus sup-norm of p equals sqrt(3)")
    start = time.perf_counter()
    sup = sup_norm_torus(parrott_polynomial(), 64, refine=True)
    elapsed = time.perf_counter() - start
    detail(node, f"sup={sup.value:.10f}, upper={sup.upper:.6f}, {elapsed:.2f}s")
    assert abs(sup.value - SQRT3) <= 5e-3
    assert sup.value - 5e-3 <= SQRT3 <= sup.upper
    assert elapsed < 30.0


def test_refutation_ratio(criterion):
    node = criterion(3, "VN ratio 2/sqrt(3), verdict violated")
    T = build(build_family(ParrottConfig.counterexample()))
    rep = vn_check(parrott_polynomial(), T, 64, refine=True)
    detail(node, f"ratio={rep.ratio:.6f}, verdict={rep.verdict}")
    assert abs(rep.ratio - 2 / SQRT3) <= 5e-3
    assert rep.verdict == "violated"


def test_brehmer_defect(criterion):
    node = criterion(4, "pair defect of the half example is -3/4 on e_(1,1)")
    worst = 0.0
    for N in (2, 3, 4):
        T = build(half_example(N))
        D = brehmer_defect(T, {1, 2})
        e = np.zeros(T.dim)
        e[T.basis.rank((1, 1))] = 1.0
        worst = max(worst, np.abs(D @ e + 0.75 * e).max())
        assert np.linalg.eigvalsh((D + D.conj().T) / 2)[0] == pytest.approx(-0.75, abs=1e-12)
    detail(node, f"max eigen-residual={worst:.1e} over N=2..4")
    assert worst <= 1e-12


def test_vn_property_suite(criterion):
    node = criterion(5, "VN inequality on 500 random families")
    start = time.perf_counter()
    rng = np.random.default_rng(5)
    n_checks = violations = 0
    max_ratio = max_excess = 0.0
    for k in range(500):
        d = 1 + k % 3
        N = int(rng.integers(0, 5))
        profile = "complex-nonzero" if k % 2 else "positive"
        T = build(random_contractive_family(d, N, seed=rng, profile=profile))
        for n in (1, 2):
            p = random_polynomial(d, n, int(rng.integers(1, 4)), rng, density=0.6)
            if p.is_zero():
                continue
            rep = vn_check(p, T, 64, refine=True)
            n_checks += 1
            max_ratio = max(max_ratio, rep.ratio)
            bound = 1 + rep.sup.uncertainty / rep.sup.value
            max_excess = max(max_excess, rep.ratio - bound)
            if rep.ratio > bound + ROUNDING or rep.verdict == "violated":
                violations += 1
    elapsed = time.perf_counter() - start
    detail(node, f"{n_checks} checks, max ratio={max_ratio:.9f}, "
                 f"max excess over bound={max_excess:.1e}, violations={violations}, "
                 f"{elapsed:.1f}s")
    assert violations == 0
    assert n_checks >= 1000 - 10
    assert elapsed < 300


def test_phase_normalization_suite(criterion):
    node = criterion(6, "gauge path independence and norm invariance")
    rng = np.random.default_rng(6)
    path_res = norm_res = 0.0
    for k in range(200):
        d = 1 + k % 3
        W = random_contractive_family(d, int(rng.integers(0, 4)), seed=rng, profile="complex-nonzero")
        _, r = gauge_phases(W)
        path_res = max(path_res, r)
        p = random_polynomial(d, 1 + k % 2, 3, rng)
        norm_res = max(norm_res, gauge_norm_invariance_check(W, p))
    detail(node, f"path residual={path_res:.1e}, norm residual={norm_res:.1e}")
    assert path_res <= 1e-12
    assert norm_res <= 1e-10


def test_boundary_push_suite(criterion):
    node = criterion(7, "scaling and push-to-boundary on 100 families")
    rng = np.random.default_rng(7)
    comm = 0.0
    max_steps_used = 0.0
    done = 0
    while done < 100:
        d = 1 + done % 3
        N = int(rng.integers(1, 4))
        W = random_contractive_family(d, N, seed=rng, profile="complex-nonzero")
        if W.in_boundary():
            continue
        done += 1
        p = random_polynomial(d, 1 + done % 2, 2, rng)
        f = random_functional(d, N, p, rng)
        res = push_to_boundary(W, f, circle_samples=360)
        assert len(res.steps) <= W.w.size
        max_steps_used = max(max_steps_used, len(res.steps) / W.w.size)
        assert res.final.in_boundary()
        assert np.abs(np.abs(res.final.w) - 1).max() <= 1e-12
        vals = res.f_values
        for step, a, b in zip(res.steps, vals, vals[1:]):
            assert b >= a - step.slack - 1e-12
        for V in res.path[:-1]:
            S = classify(V)
            radii = S.r * np.sqrt(rng.random(32))
            for t in radii * np.exp(2j * np.pi * rng.random(32)):
                comm = max(comm, validate_commuting(scale_step(S, t)).max_residual)
    detail(node, f"max commutation residual={comm:.1e}, max steps/|I|={max_steps_used:.2f}")
    assert comm <= 1e-13


def test_dilation_certificate(criterion):
    node = criterion(8, "cyclic dilation compresses exactly")
    worst = 0.0
    configs = 0
    for d in (1, 2, 3):
        for N in range(4):
            for D in range(1, 5):
                cert = build_cyclic_dilation(N, d, D, n_tests=50, seed=100 * d + 10 * N + D)
                worst = max(worst, cert.residual)
                configs += 1
    detail(node, f"{configs} configurations, max residual={worst:.1e}")
    assert worst <= 1e-12


def test_delta_rigidity(criterion):
    node = criterion(9, "delta rigidity and the all-ones tuple")
    assert solve_delta(ParrottConfig.counterexample().a).shape[1] == 0
    ones = ParrottConfig.all_ones()
    basis = solve_delta(ones.a)
    half = np.full(3, 0.5)
    proj = basis @ (basis.conj().T @ half)
    assert basis.shape[1] == 1 and np.abs(proj - half).max() <= 1e-12
    T = build(build_family(ones.with_delta((0.5, 0.5, 0.5))))
    rng = np.random.default_rng(9)
    polys = [parrott_polynomial()]
    polys += [random_polynomial(3, n, 3, rng, density=0.6) for n in (1, 2) for _ in range(10)]
    ratios = []
    for p in polys:
        rep = vn_check(p, T, 64, refine=True)
        assert rep.verdict != "violated"
        assert rep.ratio <= 1 + rep.sup.uncertainty / rep.sup.value + ROUNDING
        ratios.append(rep.ratio)
    detail(node, f"max battery ratio={max(ratios):.9f} over {len(polys)} polynomials")
