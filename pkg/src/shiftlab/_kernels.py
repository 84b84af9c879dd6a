"""Hot loops: torus-grid norm evaluation and circle sampling of a functional.

Each kernel has a numba version and a pure-numpy version computing the same
quantity.  ``SHIFTLAB_DISABLE_NUMBA=1`` (or a missing numba) selects numpy.
``SHIFTLAB_THREADS`` caps numba's thread pool.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
    from numba import njit, prange
except ImportError:  # pragma: no cover
    numba = None

_FALSY = {"", "0", "false", "no", "off"}

HAVE_NUMBA = numba is not None
BACKEND = (
    "numba"
    if HAVE_NUMBA and os.environ.get("SHIFTLAB_DISABLE_NUMBA", "").strip().lower() in _FALSY
    else "numpy"
)

if HAVE_NUMBA and "NUMBA_THREADING_LAYER" not in os.environ:
    # the bundled TBB is too old and only produces a warning
    numba.config.THREADING_LAYER = "workqueue"

if HAVE_NUMBA and os.environ.get("SHIFTLAB_THREADS"):
    numba.set_num_threads(
        max(1, min(int(os.environ["SHIFTLAB_THREADS"]), numba.config.NUMBA_NUM_THREADS))
    )


def _resolve(backend: str | None) -> str:
    backend = backend or BACKEND
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend


# ---------------------------------------------------------------------------
# largest singular value of a small matrix

def _smax_batch(A: np.ndarray) -> np.ndarray:
    """Largest singular value of each ``A[i]`` (shape ``(P, n, n)``)."""
    n = A.shape[-1]
    if n == 1:
        return np.abs(A[:, 0, 0])
    if n == 2:
        fro = np.einsum("pij,pij->p", A, A.conj()).real
        det = A[:, 0, 0] * A[:, 1, 1] - A[:, 0, 1] * A[:, 1, 0]
        disc = np.sqrt(np.maximum(fro * fro - 4.0 * np.abs(det) ** 2, 0.0))
        return np.sqrt(0.5 * (fro + disc))
    return np.linalg.svd(A, compute_uv=False)[:, 0]


# ---------------------------------------------------------------------------
# grid norms: ||p(exp(2 pi i k / m))|| for every k in {0..m-1}^d, C order

def grid_norms_numpy(coeffs: np.ndarray, exps: np.ndarray, m: int) -> np.ndarray:
    n_terms, n, _ = coeffs.shape
    d = exps.shape[1]
    # p on the grid is a d-dimensional inverse DFT of the coefficient tensor
    C = np.zeros((n, n) + (m,) * d, dtype=np.complex128)
    for t in range(n_terms):
        C[(slice(None), slice(None)) + tuple(int(e) % m for e in exps[t])] += coeffs[t]
    axes = tuple(range(2, 2 + d))
    vals = np.fft.ifftn(C, axes=axes) * float(m) ** d
    vals = np.moveaxis(vals.reshape(n, n, -1), -1, 0)
    return _smax_batch(vals)


if HAVE_NUMBA:

    @njit(cache=True)
    def _smax_nb(A):
        n = A.shape[0]
        if n == 1:
            return abs(A[0, 0])
        if n == 2:
            fro = 0.0
            for a in range(2):
                for b in range(2):
                    fro += A[a, b].real ** 2 + A[a, b].imag ** 2
            det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
            disc = fro * fro - 4.0 * (det.real ** 2 + det.imag ** 2)
            if disc < 0.0:
                disc = 0.0
            return np.sqrt(0.5 * (fro + np.sqrt(disc)))
        return np.linalg.svd(A)[1][0]

    @njit(parallel=True, cache=True)
    def _grid_values_nb(coeffs, exps, m):
        n_terms, n, _ = coeffs.shape
        d = exps.shape[1]
        inner = m ** (d - 1)
        roots = np.exp(2j * np.pi * np.arange(m) / m)
        step = np.empty((n_terms, d), dtype=np.int64)
        for t in range(n_terms):
            for ax in range(d):
                step[t, ax] = exps[t, ax] % m
        vals = np.zeros((m * inner, n, n), dtype=np.complex128)
        # one block per leading digit; inside it the digits advance like an
        # odometer and each term's phase index is updated incrementally
        for lead in prange(m):
            digits = np.zeros(d, dtype=np.int64)
            phase = np.empty(n_terms, dtype=np.int64)
            for t in range(n_terms):
                phase[t] = (step[t, 0] * lead) % m
            for rest in range(inner):
                flat = lead * inner + rest
                for t in range(n_terms):
                    z = roots[phase[t]]
                    for a in range(n):
                        for b in range(n):
                            vals[flat, a, b] += coeffs[t, a, b] * z
                ax = d - 1
                while ax > 0:
                    digits[ax] += 1
                    carry = digits[ax] == m
                    for t in range(n_terms):
                        # advancing digit ax by one; a wrap subtracts m * step
                        phase[t] += step[t, ax]
                        if phase[t] >= m:
                            phase[t] -= m
                    if not carry:
                        break
                    digits[ax] = 0
                    ax -= 1
        return vals

    @njit(parallel=True, cache=True)
    def _smax_small_nb(vals):
        out = np.empty(vals.shape[0])
        for i in prange(vals.shape[0]):
            out[i] = _smax_nb(vals[i])
        return out


def grid_norms_numba(coeffs: np.ndarray, exps: np.ndarray, m: int) -> np.ndarray:
    vals = _grid_values_nb(
        np.ascontiguousarray(coeffs, dtype=np.complex128),
        np.ascontiguousarray(exps, dtype=np.int64),
        int(m),
    )
    if vals.shape[1] <= 2:
        return _smax_small_nb(vals)
    # batched LAPACK beats a per-point SVD call from compiled code
    return _smax_batch(vals)


def grid_norms(coeffs, exps, m, backend: str | None = None) -> np.ndarray:
    """Operator norms of a matrix polynomial on the ``m**d`` torus grid.

    ``coeffs`` has shape ``(terms, n, n)`` and ``exps`` shape ``(terms, d)``.
    The result is flat in C order of the grid digits.
    """
    if _resolve(backend) == "numba":
        return grid_norms_numba(coeffs, exps, m)
    return grid_norms_numpy(np.asarray(coeffs, dtype=np.complex128), np.asarray(exps), int(m))


# ---------------------------------------------------------------------------
# circle functional: <p(T(w(t))) g, h> where w(t) scales the masked entries by t

def circle_functional_numpy(w, mask, ts, succ, coeffs, exps, g, h):
    S = ts.shape[0]
    n_inner, d = w.shape
    n, D = g.shape
    wt = np.where(mask[None], ts[:, None, None] * w[None], w[None])
    cache = {(0,) * d: np.broadcast_to(g, (S, n, D))}

    def power(K):
        K = tuple(int(k) for k in K)
        if K in cache:
            return cache[K]
        ax = max(i for i, k in enumerate(K) if k)
        prev = power(K[:ax] + (K[ax] - 1,) + K[ax + 1:])
        out = np.zeros((S, n, D), dtype=np.complex128)
        out[:, :, succ[:, ax]] = wt[:, None, :, ax] * prev[:, :, :n_inner]
        cache[K] = out
        return out

    f = np.zeros(S, dtype=np.complex128)
    hc = h.conj()
    for t in range(coeffs.shape[0]):
        v = power(exps[t])
        f += np.einsum("ai,ab,sbi->s", hc, coeffs[t], v)
    return f


if HAVE_NUMBA:

    @njit(cache=True)
    def _apply_monomial_nb(wt, succ, g, K):
        n_inner, d = wt.shape
        n, D = g.shape
        cur = g.copy()
        nxt = np.empty_like(cur)
        for ax in range(d):
            for _ in range(K[ax]):
                nxt[:, :] = 0.0
                for i in range(n_inner):
                    c = wt[i, ax]
                    if c != 0:
                        tgt = succ[i, ax]
                        for b in range(n):
                            nxt[b, tgt] = c * cur[b, i]
                cur, nxt = nxt, cur
        return cur

    @njit(cache=True)
    def _functional_at_nb(wt, succ, coeffs, exps, g, h):
        n, D = g.shape
        acc = 0.0 + 0.0j
        for t in range(coeffs.shape[0]):
            v = _apply_monomial_nb(wt, succ, g, exps[t])
            for a in range(n):
                for b in range(n):
                    cab = coeffs[t, a, b]
                    if cab != 0:
                        for i in range(D):
                            acc += np.conj(h[a, i]) * cab * v[b, i]
        return acc

    @njit(parallel=True, cache=True)
    def _circle_functional_nb(w, mask, ts, succ, coeffs, exps, g, h):
        S = ts.shape[0]
        out = np.zeros(S, dtype=np.complex128)
        for s in prange(S):
            wt = np.where(mask, ts[s] * w, w)
            out[s] = _functional_at_nb(wt, succ, coeffs, exps, g, h)
        return out


def circle_functional_numba(w, mask, ts, succ, coeffs, exps, g, h):
    return _circle_functional_nb(
        np.ascontiguousarray(w, dtype=np.complex128),
        np.ascontiguousarray(mask, dtype=np.bool_),
        np.ascontiguousarray(ts, dtype=np.complex128),
        np.ascontiguousarray(succ, dtype=np.int64),
        np.ascontiguousarray(coeffs, dtype=np.complex128),
        np.ascontiguousarray(exps, dtype=np.int64),
        np.ascontiguousarray(g, dtype=np.complex128),
        np.ascontiguousarray(h, dtype=np.complex128),
    )


def circle_functional(w, mask, ts, succ, coeffs, exps, g, h, backend: str | None = None):
    """Evaluate ``<p(T(w(t))) g, h>`` for each ``t`` in ``ts``.

    ``w`` is the ``(dim H_N, d)`` weight array, ``mask`` marks entries
    multiplied by ``t``, ``succ`` the successor table restricted to
    ``|I| <= N``, and ``g``, ``h`` have shape ``(n, dim H_{N+1})``.
    """
    args = (w, mask, np.atleast_1d(np.asarray(ts, dtype=np.complex128)), succ, coeffs, exps, g, h)
    if _resolve(backend) == "numba":
        return circle_functional_numba(*args)
    return circle_functional_numpy(*(np.asarray(a) for a in args))
