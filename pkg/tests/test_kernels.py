"""The numba and numpy backends must agree."""
import numpy as np
import pytest

from shiftlab import _kernels
from shiftlab.boundary import classify, random_functional
from shiftlab.vncheck import random_polynomial
from shiftlab.weights import random_contractive_family

needs_numba = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")


@needs_numba
@pytest.mark.parametrize("d, n, m", [(1, 1, 16), (2, 2, 9), (3, 1, 8), (3, 3, 6), (2, 4, 5)])
def test_grid_norms_backends_agree(d, n, m):
    rng = np.random.default_rng(d * 100 + n)
    p = random_polynomial(d, n, 3, rng)
    a = _kernels.grid_norms(p.coeff_array(), p.exponent_array(), m, backend="numba")
    b = _kernels.grid_norms(p.coeff_array(), p.exponent_array(), m, backend="numpy")
    assert a.shape == (m ** d,)
    assert np.abs(a - b).max() <= 1e-12 * max(1.0, b.max())


def test_degree_at_least_grid_size_wraps_correctly():
    # z^m = 1 on the m-point grid
    coeffs = np.ones((2, 1, 1), dtype=complex)
    exps = np.array([[5], [0]])
    for backend in ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else []):
        v = _kernels.grid_norms(coeffs, exps, 5, backend=backend)
        assert np.allclose(v, 2.0)


@needs_numba
@pytest.mark.parametrize("d, N, n", [(1, 3, 1), (2, 2, 2), (3, 2, 1)])
def test_circle_functional_backends_agree(d, N, n):
    rng = np.random.default_rng(d + N + n)
    W = random_contractive_family(d, N, seed=rng, profile="complex-nonzero")
    S = classify(W)
    f = random_functional(d, N, random_polynomial(d, n, 3, rng), rng)
    ts = 1.3 * np.exp(2j * np.pi * rng.random(17))
    a = f.on_circle(S, ts, backend="numba")
    b = f.on_circle(S, ts, backend="numpy")
    assert np.abs(a - b).max() <= 1e-13


def test_unknown_backend():
    with pytest.raises(ValueError):
        _kernels.grid_norms(np.ones((1, 1, 1)), np.zeros((1, 1), int), 4, backend="cuda")
