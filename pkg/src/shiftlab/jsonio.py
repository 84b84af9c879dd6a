"""JSON formats for weight families, beta families, polynomials and matrices.

Complex numbers are written as ``{"re": x, "im": y}`` inside weight entries
and as ``[re, im]`` pairs everywhere else.  Multi-indices are integer lists.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ShiftlabError, StructureError
from .multiindex import BasisEnumeration
from .vncheck import MatrixPolynomial
from .weights import BetaFamily, WeightFamily


class InputError(ShiftlabError):
    """Malformed input document; the message names the offending location."""


def _require(obj: dict, key: str, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise InputError(f"{where}: missing key {key!r}")
    return obj[key]


def _int(x: Any, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise InputError(f"{where}: expected an integer, got {x!r}")
    return x


def _number(x: Any, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise InputError(f"{where}: expected a number, got {x!r}")
    return float(x)


def _index(x: Any, d: int, where: str) -> tuple[int, ...]:
    if not isinstance(x, list) or len(x) != d:
        raise InputError(f"{where}: expected a list of {d} integers, got {x!r}")
    I = tuple(_int(c, where) for c in x)
    if any(c < 0 for c in I):
        raise InputError(f"{where}: negative coordinate in {list(I)}")
    return I


def _pair(x: Any, where: str) -> complex:
    if not isinstance(x, list) or len(x) != 2:
        raise InputError(f"{where}: expected [re, im], got {x!r}")
    return complex(_number(x[0], where), _number(x[1], where))


def pair(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


# -- weight families ---------------------------------------------------------

def weights_to_dict(W: WeightFamily) -> dict:
    return {
        "d": W.d,
        "N": W.N,
        "weights": [
            {"I": list(I), "j": j, "re": w.real, "im": w.imag} for (I, j), w in W.entries()
        ],
    }


def weights_from_dict(doc: dict) -> WeightFamily:
    d = _int(_require(doc, "d", "$"), "$.d")
    N = _int(_require(doc, "N", "$"), "$.N")
    if d < 1 or N < 0:
        raise InputError(f"$: need d >= 1 and N >= 0, got d={d}, N={N}")
    items = _require(doc, "weights", "$")
    if not isinstance(items, list):
        raise InputError("$.weights: expected a list")
    entries = {}
    for k, e in enumerate(items):
        where = f"$.weights[{k}]"
        I = _index(_require(e, "I", where), d, where + ".I")
        j = _int(_require(e, "j", where), where + ".j")
        if not 1 <= j <= d:
            raise InputError(f"{where}.j: axis {j} out of range 1..{d}")
        if sum(I) > N:
            raise InputError(f"{where}.I: degree of {list(I)} exceeds N={N}")
        if (I, j) in entries:
            raise InputError(f"{where}: duplicate entry (I={list(I)}, j={j})")
        entries[(I, j)] = complex(_number(_require(e, "re", where), where + ".re"),
                                  _number(e.get("im", 0.0), where + ".im"))
    return WeightFamily.from_entries(d, N, entries)


# -- beta families -----------------------------------------------------------

def beta_to_dict(B: BetaFamily) -> dict:
    return {
        "d": B.d,
        "N": B.N,
        "beta": [{"I": list(I), "value": float(v)} for I, v in zip(B.basis, B.beta)],
    }


def beta_from_dict(doc: dict) -> BetaFamily:
    d = _int(_require(doc, "d", "$"), "$.d")
    N = _int(_require(doc, "N", "$"), "$.N")
    items = _require(doc, "beta", "$")
    if not isinstance(items, list):
        raise InputError("$.beta: expected a list")
    entries = {}
    for k, e in enumerate(items):
        where = f"$.beta[{k}]"
        I = _index(_require(e, "I", where), d, where + ".I")
        entries[I] = _number(_require(e, "value", where), where + ".value")
    return BetaFamily.from_entries(d, N, entries)


# -- matrix polynomials ------------------------------------------------------

def polynomial_to_dict(p: MatrixPolynomial) -> dict:
    return {
        "d": p.d,
        "n": p.n,
        "terms": [
            {"K": list(K), "coeff": [[pair(z) for z in row] for row in C]}
            for K, C in p.terms.items()
        ],
    }


def polynomial_from_dict(doc: dict) -> MatrixPolynomial:
    d = _int(_require(doc, "d", "$"), "$.d")
    n = _int(_require(doc, "n", "$"), "$.n")
    items = _require(doc, "terms", "$")
    if not isinstance(items, list):
        raise InputError("$.terms: expected a list")
    terms = {}
    for k, e in enumerate(items):
        where = f"$.terms[{k}]"
        K = _index(_require(e, "K", where), d, where + ".K")
        rows = _require(e, "coeff", where)
        if not isinstance(rows, list) or len(rows) != n:
            raise InputError(f"{where}.coeff: expected {n} rows")
        C = np.empty((n, n), dtype=np.complex128)
        for r, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != n:
                raise InputError(f"{where}.coeff[{r}]: expected {n} entries")
            for s, z in enumerate(row):
                C[r, s] = _pair(z, f"{where}.coeff[{r}][{s}]")
        terms[K] = terms[K] + C if K in terms else C
    return MatrixPolynomial(d, n, terms)


# -- matrices and phases -----------------------------------------------------

def matrix_to_list(A: np.ndarray) -> list:
    """Row-major nested list of ``[re, im]`` pairs."""
    A = np.asarray(A, dtype=np.complex128)
    return np.stack([A.real, A.imag], axis=-1).tolist()


def matrices_to_dict(mats, basis: BasisEnumeration) -> dict:
    return {
        "basis": [list(I) for I in basis],
        "matrices": [matrix_to_list(A) for A in mats],
    }


def phases_to_dict(lam: np.ndarray, basis: BasisEnumeration) -> dict:
    return {",".join(map(str, I)): pair(z) for I, z in zip(basis, lam)}


# -- files -------------------------------------------------------------------

def load_json(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fp:
            return json.load(fp)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def load_weights(path: str | Path) -> WeightFamily:
    try:
        return weights_from_dict(load_json(path))
    except StructureError as exc:
        raise InputError(f"{path}: {exc}") from None


def load_polynomial(path: str | Path) -> MatrixPolynomial:
    return polynomial_from_dict(load_json(path))


def dump_json(obj: Any, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        json.dump(obj, fp, indent=2)
        fp.write("\n")
