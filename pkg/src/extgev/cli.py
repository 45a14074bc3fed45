"""Command-line front end: ``extgev {weights,assoc,lambert,tfr,fit,verify}``.

Exit codes: 0 success, 1 verification failure, 2 invalid input or missing
file, 3 grid not aligned with the sample lattice.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .associated import associated_value, fit_sandwich, komatsu_dual
from .io import SchemaError, dumps, read_signal, table_to_csv, tfr_to_csv, tfr_to_dict
from .lambertw import lambert_w
from .suites import DEFAULT_SEED, SUITES, run_suite
from .testfn import characterize, gaussian, hermite, modulated_translated
from .tfr import KINDS, Axis, LatticeError, PhaseSpaceGrid, tfr
from .weights import LogWeightTable, WeightParams, check_conditions

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_LATTICE = 0, 1, 2, 3


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _points(args) -> np.ndarray:
    if args.x:
        return np.asarray(args.x, dtype=float)
    if args.xmin is None or args.xmax is None:
        raise ValueError("give --x values or --xmin/--xmax")
    if not 0 < args.xmin < args.xmax:
        raise ValueError("need 0 < xmin < xmax")
    if args.count < 2:
        raise ValueError("--count must be >= 2")
    return np.logspace(math.log10(args.xmin), math.log10(args.xmax), args.count)


def cmd_weights(args) -> int:
    params = WeightParams(args.tau, args.sigma)
    rep = check_conditions(params, args.pmax)
    lm = LogWeightTable.build(params, args.pmax).logM
    rows = [(p, float(lm[p]), float(lm[p] - lm[p - 1]) if p else 0.0) for p in range(args.pmax + 1)]
    if args.format == "csv":
        _emit(table_to_csv(["p", "log_M", "log_ratio"], rows), args.out)
    else:
        cond = {k: v for k, v in asdict(rep).items() if not isinstance(v, (list, np.ndarray))}
        cond["factorial"] = asdict(rep.factorial)
        cond["all_hold"] = rep.all_hold
        doc = {"tau": params.tau, "sigma": params.sigma, "pmax": args.pmax,
               "table": [{"p": p, "log_M": v, "log_ratio": r} for p, v, r in rows], "conditions": cond}
        _emit(dumps(doc) + "\n", args.out)
    return EXIT_OK


def cmd_assoc(args) -> int:
    params = WeightParams(args.tau, args.sigma)
    doc = {"tau": params.tau, "sigma": params.sigma}
    if args.dual is not None:
        if args.dual < 1:
            raise ValueError("--dual needs p >= 1")
        doc["dual"] = {"p": args.dual, "value": komatsu_dual(args.dual, params),
                       "log_M": LogWeightTable.build(params, args.dual).logM[args.dual]}
    xs = _points(args) if (args.x or args.xmin is not None) else np.array([])
    rows = []
    for x in xs:
        v = associated_value(float(x), params)
        rows.append((float(x), v.value, v.argmax))
    if args.sandwich:
        if xs.size < 2 or np.any(xs <= 1):
            raise ValueError("--sandwich needs at least two points, all > 1")
        fit = fit_sandwich(params, xs)
        doc["sandwich"] = {"A": fit.A, "B": fit.B, "range": list(fit.validated_range),
                           "violations": fit.violations, "validated": fit.validated}
    if args.format == "csv" and not (args.dual is not None or args.sandwich):
        _emit(table_to_csv(["x", "T", "argmax_p"], rows), args.out)
    else:
        doc["values"] = [{"x": x, "T": t, "argmax_p": p} for x, t, p in rows]
        _emit(dumps(doc) + "\n", args.out)
    return EXIT_OK


def cmd_lambert(args) -> int:
    xs = _points(args)
    rows = []
    for x in xs:
        ev = lambert_w(float(x))
        rows.append((ev.x, ev.w, ev.residual, ev.iterations, int(ev.certified)))
    header = ["x", "W", "residual", "iterations", "certified"]
    if args.format == "csv":
        _emit(table_to_csv(header, rows), args.out)
    else:
        _emit(dumps([dict(zip(header, r)) for r in rows]) + "\n", args.out)
    return EXIT_OK


def cmd_tfr(args) -> int:
    f = read_signal(args.signal)
    g = read_signal(args.window) if args.window else f
    default = PhaseSpaceGrid.fast_default(f.axis, args.kind)
    xa = Axis(args.x_center if args.x_center is not None else default.x.center,
              args.x_step if args.x_step is not None else default.x.step,
              args.x_count if args.x_count is not None else default.x.count)
    wa = Axis(args.w_center if args.w_center is not None else default.w.center,
              args.w_step if args.w_step is not None else default.w.step,
              args.w_count if args.w_count is not None else default.w.count)
    res = tfr(args.kind, f, g, PhaseSpaceGrid(xa, wa), args.mode)
    if args.format == "csv":
        _emit(tfr_to_csv(res), args.out)
    else:
        _emit(dumps(tfr_to_dict(res)) + "\n", args.out)
    return EXIT_OK


def _fit_doc(rep) -> dict:
    def tf(t):
        return None if t is None else {"tau": t.tau, "log_c": t.log_c}

    return {
        "function": rep.function_id, "sigma": rep.sigma, "K": rep.K,
        "joint": tf(rep.joint), "decay": tf(rep.decay), "deriv": tf(rep.deriv),
        "fourier": tf(rep.fourier), "l2": tf(rep.l2), "sum_index": tf(rep.sum_fit),
        "inflation_joint_log_c": rep.inflation_joint_log_c,
        "sum_product_consistent": rep.sum_product_consistent,
        "decay_checks": [asdict(d) for d in rep.decay_checks],
        "fourier_decay_checks": [asdict(d) for d in rep.fourier_decay_checks],
        "finite": rep.finite, "corollary_finite": rep.corollary_finite,
    }


def cmd_fit(args) -> int:
    if args.family == "gaussian":
        f = gaussian(args.a)
    elif args.family == "hermite":
        f = hermite(args.k, args.a)
    else:
        f = modulated_translated(args.x0, args.w0, args.a)
    rep = characterize(f, args.sigma, args.K, include_l2=not args.no_l2)
    _emit(dumps(_fit_doc(rep)) + "\n", args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    rep = run_suite(args.suite, seed=args.seed)
    for r in rep.records:
        sys.stdout.write(f"{'PASS' if r.passed else 'FAIL'}  {r.name}  measured={r.measured:.6g}\n")
    sys.stdout.write(f"suite {args.suite}: {'PASS' if rep.passed else 'FAIL'}\n")
    if args.json:
        Path(args.json).write_text(dumps(rep.as_dict()) + "\n")
    return EXIT_OK if rep.passed else EXIT_FAIL


def _add_points(p):
    p.add_argument("--x", type=float, action="append", help="evaluation point (repeatable)")
    p.add_argument("--xmin", type=float)
    p.add_argument("--xmax", type=float)
    p.add_argument("--count", type=int, default=50, help="log-spaced points between xmin and xmax")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="extgev", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("weights", help="log weight table and sequence conditions")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--pmax", type=int, default=200)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("assoc", help="associated function, duality and sandwich fit")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)
    _add_points(p)
    p.add_argument("--dual", type=int, help="evaluate the duality supremum at this p")
    p.add_argument("--sandwich", action="store_true", help="fit the Lambert-W sandwich on the points")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_assoc)

    p = sub.add_parser("lambert", help="principal Lambert W with residuals")
    _add_points(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_lambert)

    p = sub.add_parser("tfr", help="time-frequency transform of a signal file")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--signal", required=True)
    p.add_argument("--window", help="window signal file (default: the signal itself)")
    p.add_argument("--mode", choices=("reference", "fast"), default="reference")
    for ax in ("x", "w"):
        p.add_argument(f"--{ax}-center", type=float)
        p.add_argument(f"--{ax}-step", type=float)
        p.add_argument(f"--{ax}-count", type=int)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_tfr)

    p = sub.add_parser("fit", help="membership parameters for an analytic test function")
    p.add_argument("--family", choices=("gaussian", "hermite", "modulated"), default="gaussian")
    p.add_argument("--a", type=float, default=math.pi, help="Gaussian width parameter")
    p.add_argument("--k", type=int, default=0, help="Hermite index")
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--w0", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=2.0)
    p.add_argument("--K", type=int, default=12)
    p.add_argument("--no-l2", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", default="all", help=f"one of {', '.join(SUITES + ('all',))}")
    p.add_argument("--json", help="write the report here")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.verb == "weights" and args.pmax < 3:
        ap.error("--pmax must be >= 3")
    if args.verb == "verify" and args.suite not in SUITES + ("all",):
        ap.error(f"unknown suite {args.suite!r}")
    try:
        return args.func(args)
    except LatticeError as exc:
        sys.stderr.write(f"extgev: {exc}\n")
        return EXIT_LATTICE
    except (FileNotFoundError, IsADirectoryError) as exc:
        sys.stderr.write(f"extgev: {exc}\n")
        return EXIT_INPUT
    except (SchemaError, ValueError) as exc:
        sys.stderr.write(f"extgev: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
