"""``shiftlab`` command-line interface.

Exit codes: 0 success, 1 mathematical failure (violation, failed relation,
undefined operation), 2 input error.
"""
from __future__ import annotations

import argparse
import json
import sys
from itertools import combinations
from typing import Callable

import numpy as np

from . import __version__, _kernels
from .boundary import Functional, classify, push_to_boundary, random_functional
from .dilation import brehmer_eigenvalues, build_cyclic_dilation, doubly_commuting_obstruction
from .errors import CommutationError, DomainError, ShiftlabError, StructureError
from .jsonio import (
    InputError,
    dump_json,
    load_json,
    load_polynomial,
    matrices_to_dict,
    phases_to_dict,
    weights_from_dict,
    weights_to_dict,
)
from .multiindex import dimension
from .normalize import gauge_phases
from .parrott import ParrottConfig, parrott_polynomial, refutation_report
from .shiftbuild import build
from .vncheck import random_polynomial, vn_check
from .weights import WeightFamily, validate_commuting

MAX_DIM = 50_000


class Failure(Exception):
    """Carries a result document that should exit with status 1."""

    def __init__(self, result: dict):
        super().__init__()
        self.result = result


def _load(path: str) -> WeightFamily:
    doc = load_json(path)
    d, N = (doc.get("d"), doc.get("N")) if isinstance(doc, dict) else (None, None)
    if isinstance(d, int) and isinstance(N, int) and d >= 1 and N >= 0:
        D = dimension(d, N + 1)
        if D > MAX_DIM:
            raise InputError(f"{path}: dim H_(N+1) = {D} exceeds the safety cap {MAX_DIM}")
    try:
        return weights_from_dict(doc)
    except StructureError as exc:
        raise InputError(f"{path}: {exc}") from None


def _settings(args: argparse.Namespace) -> dict:
    keys = ("tol", "grid", "max_grid", "seed", "refine", "samples", "battery")
    out = {k: getattr(args, k) for k in keys if hasattr(args, k)}
    out["backend"] = _kernels.BACKEND
    return out


# -- subcommands ---------------------------------------------------------------

def cmd_validate(args) -> dict:
    W = _load(args.weights)
    report = validate_commuting(W, args.tol).to_dict()
    report["contractive"] = W.is_contractive()
    report["injective"] = W.injective
    if not report["ok"]:
        raise Failure(report)
    return report


def cmd_build(args) -> dict:
    W = _load(args.weights)
    T = build(W, args.tol)
    out = matrices_to_dict(T.mats, T.basis)
    out["commutator_norm"] = T.commutator_norm()
    return out


def cmd_normalize(args) -> dict:
    W = _load(args.weights)
    lam, residual = gauge_phases(W)
    return {
        "modulus_family": weights_to_dict(W.modulus()),
        "lambda": phases_to_dict(lam, build(W, args.tol).basis),
        "path_residual": residual,
    }


def cmd_classify(args) -> dict:
    return classify(_load(args.weights)).to_dict()


def _functional(W: WeightFamily, poly_path: str | None, seed: int) -> Functional | None:
    if poly_path is None:
        return None
    p = load_polynomial(poly_path)
    if p.d != W.d:
        raise InputError(f"polynomial has d={p.d} but the family has d={W.d}")
    return random_functional(W.d, W.N, p, np.random.default_rng(seed))


def cmd_push(args) -> dict:
    W = _load(args.weights)
    res = push_to_boundary(W, _functional(W, args.poly, args.seed), args.samples)
    out = res.to_dict()
    out["functional"] = "constant 1" if args.poly is None else f"<p(T)g,h> with p from {args.poly}"
    out["final_family"] = weights_to_dict(res.final)
    return out


def cmd_vncheck(args) -> dict:
    W = _load(args.weights)
    p = load_polynomial(args.poly)
    if p.d != W.d:
        raise InputError(f"polynomial has d={p.d} but the family has d={W.d}")
    report = vn_check(p, build(W, args.tol), args.grid, args.refine,
                      max_grid=args.max_grid).to_dict()
    if report["verdict"] == "violated":
        raise Failure(report)
    return report


def cmd_dilate_check(args) -> dict:
    if args.d >= 1 and args.N >= 0 and args.degree >= 1:
        size = (args.N + args.degree + 2) ** args.d
        if size > MAX_DIM:
            raise InputError(f"dilation space has {size} points, above the safety cap {MAX_DIM}")
    cert = build_cyclic_dilation(args.N, args.d, args.degree, args.tests, args.seed)
    out = cert.to_dict()
    out["residual_tol"] = 1e-12
    if cert.residual > 1e-12:
        raise Failure(out)
    return out


def _brehmer_table(W: WeightFamily, tol: float, axes_sets=None) -> dict:
    T = build(W, tol)
    if axes_sets is None:
        axes_sets = [S for k in range(1, W.d + 1) for S in combinations(range(1, W.d + 1), k)]
    spectra = []
    for S in axes_sets:
        ev = brehmer_eigenvalues(T, S)
        spectra.append({"S": list(S), "min_eigenvalue": float(ev[0]), "eigenvalues": ev.tolist()})
    pairs = []
    for j, k in combinations(range(1, W.d + 1), 2):
        lo, verdict = doubly_commuting_obstruction(T, j, k)
        pairs.append({"axes": [j, k], "min_eigenvalue": lo, "verdict": verdict})
    return {"spectra": spectra, "pair_obstructions": pairs}


def cmd_brehmer(args) -> dict:
    W = _load(args.weights)
    sets = None
    if args.axes:
        sets = []
        for text in args.axes:
            try:
                S = tuple(int(a) for a in text.split(","))
            except ValueError:
                raise InputError(f"--axes {text!r}: expected comma-separated integers") from None
            if not all(1 <= j <= W.d for j in S):
                raise InputError(f"--axes {text!r}: axes must lie in 1..{W.d}")
            sets.append(S)
    return _brehmer_table(W, args.tol, sets)


def cmd_parrott(args) -> dict:
    base = ParrottConfig.all_ones() if args.all_ones else ParrottConfig.counterexample()
    config = base.with_delta(args.delta)
    report = refutation_report(config, args.grid, args.refine)
    out = report.to_dict()
    print(
        f"||p(T)|| = {report.norm_compressed:.9f}  sup ||p|| = {report.sup.value:.7f}"
        f" (+{report.sup.uncertainty:.3g})  ratio = {report.ratio:.4f}  -> {report.verdict}",
        file=sys.stderr,
    )
    return out


def cmd_pipeline(args) -> dict:
    W = _load(args.weights)
    rng = np.random.default_rng(args.seed)
    stages: dict[str, dict] = {}
    val = validate_commuting(W, args.tol)
    stages["validate"] = val.to_dict()
    if not val.ok:
        raise Failure({"stages": stages})
    T = build(W, args.tol)
    injective, contractive = W.injective, W.is_contractive()

    if injective:
        lam, residual = gauge_phases(W)
        stages["normalize"] = {"status": "ok", "path_residual": residual}
    else:
        stages["normalize"] = {"status": "skipped", "reason": "zero weights"}

    if injective and contractive:
        state = classify(W)
        stages["classify"] = {"status": "ok", **state.to_dict()}
        if args.push:
            p = random_polynomial(W.d, 1, 2, rng)
            res = push_to_boundary(W, random_functional(W.d, W.N, p, rng), args.samples)
            stages["push"] = {"status": "ok", **res.to_dict()}
        else:
            stages["push"] = {"status": "skipped", "reason": "not requested (--push)"}
    else:
        reason = "zero weights" if not injective else "not contractive"
        stages["classify"] = {"status": "skipped", "reason": reason}
        stages["push"] = {"status": "skipped", "reason": reason}

    polys = []
    for _ in range(args.battery):
        polys.append(("scalar", random_polynomial(W.d, 1, 3, rng, density=0.6)))
        polys.append(("2x2", random_polynomial(W.d, 2, 3, rng, density=0.6)))
    if W.d == 3:
        polys.append(("parrott", parrott_polynomial()))
    runs = []
    for kind, p in polys:
        rep = vn_check(p, T, args.grid, args.refine, args.tol).to_dict()
        runs.append({"kind": kind, "ratio": rep["ratio"], "slack_ratio": rep["slack_ratio"],
                     "verdict": rep["verdict"]})
    violated = any(r["verdict"] == "violated" for r in runs)
    stages["vn_battery"] = {
        "status": "violated" if violated else "holds",
        "max_ratio": max((r["ratio"] for r in runs), default=None),
        "runs": runs,
    }
    stages["brehmer"] = _brehmer_table(W, args.tol)
    out = {"stages": stages, "injective": injective, "contractive": contractive}
    # injective contractive shifts always satisfy the inequality, so a violation there is a failure
    if violated and injective and contractive:
        raise Failure(out)
    return out


# -- argument parsing ----------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-10, help="commutation tolerance")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-o", "--output", help="write JSON here instead of stdout")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="pretty", action="store_false", help="compact JSON")
    fmt.add_argument("--pretty", dest="pretty", action="store_true", help="indented JSON (default)")
    common.set_defaults(pretty=True)

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--grid", type=int, default=64, help="torus grid points per axis")
    grid.add_argument("--refine", action=argparse.BooleanOptionalAction, default=True)

    ap = argparse.ArgumentParser(prog="shiftlab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"shiftlab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name: str, fn: Callable, help: str, parents=(common,)):
        sp = sub.add_parser(name, help=help, parents=list(parents))
        sp.set_defaults(func=fn)
        return sp

    add("validate", cmd_validate, "check the commutation relations").add_argument("weights")
    add("build", cmd_build, "emit the shift matrices").add_argument("weights")
    add("normalize", cmd_normalize, "phase-normalize a nonzero-weight family").add_argument("weights")
    add("classify", cmd_classify, "good indices and scalable pairs").add_argument("weights")

    sp = add("push", cmd_push, "push a family to the unimodular boundary")
    sp.add_argument("weights")
    sp.add_argument("--poly", help="matrix polynomial defining f = <p(T)g,h> (random g, h)")
    sp.add_argument("--samples", type=int, default=720, help="points on the circle |t| = r")

    sp = add("vn-check", cmd_vncheck, "von Neumann ratio for one polynomial", (common, grid))
    sp.add_argument("weights")
    sp.add_argument("poly")
    sp.add_argument("--max-grid", type=int, help="double the grid up to this size while inconclusive")

    sp = add("dilate-check", cmd_dilate_check, "finite unitary dilation of the all-ones shift")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--degree", type=int, default=4, help="polynomial degree bound")
    sp.add_argument("--tests", type=int, default=50, help="random test polynomials")

    sp = add("brehmer", cmd_brehmer, "Brehmer defect spectra")
    sp.add_argument("weights")
    sp.add_argument("--axes", action="append", help="comma-separated axis set, repeatable")

    sp = add("parrott", cmd_parrott, "zero-weight counterexample report", (common, grid))
    sp.add_argument("--all-ones", action="store_true", help="use a_ij = 1 instead")
    sp.add_argument("--delta", type=float, nargs=3, default=(0.0, 0.0, 0.0),
                    help="origin weights delta_j")

    sp = add("pipeline", cmd_pipeline, "run every stage and emit one certificate", (common, grid))
    sp.add_argument("weights")
    sp.add_argument("--battery", type=int, default=4, help="random polynomials per kind")
    sp.add_argument("--push", action="store_true", help="include the push-to-boundary stage")
    sp.add_argument("--samples", type=int, default=720)
    return ap


def _emit(doc: dict, args) -> None:
    if args.output:
        dump_json(doc, args.output)
    else:
        print(json.dumps(doc, indent=2 if args.pretty else None))


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    doc = {"tool": "shiftlab", "version": __version__, "command": args.command,
           "settings": _settings(args)}
    try:
        doc["result"] = args.func(args)
        status = 0
    except Failure as f:
        doc["result"] = f.result
        status = 1
    except (InputError, StructureError) as exc:
        print(f"shiftlab: input error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, CommutationError, ShiftlabError) as exc:
        doc["error"] = {"type": type(exc).__name__, "message": str(exc)}
        status = 1
    except ValueError as exc:
        # argument values the library rejects (grid too small, N < 0, ...)
        print(f"shiftlab: invalid argument: {exc}", file=sys.stderr)
        return 2
    doc["status"] = status
    _emit(doc, args)
    return status


if __name__ == "__main__":
    sys.exit(main())
