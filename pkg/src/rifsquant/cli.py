"""Command line front end: ``rifsquant {kappa,pipeline,reproduce}``.

Exit status is 0 on success, 2 for invalid input and 3 when an enumeration
budget (env FRACTAL_QUANT_BUDGET) is exceeded.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from .core import load_spec
from .errors import BudgetExceeded, RifsError
from .examples import EXAMPLE_IDS, example_spec
from .experiments import dimension_pipeline, reproduce_example
from .pressure import solve_kappa
from .quantization import results_csv

EXIT_OK, EXIT_INVALID, EXIT_BUDGET = 0, 2, 3


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _write_json(out, name, payload):
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, name)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")
    return path


def _spec(args):
    if args.spec:
        return load_spec(args.spec)
    if args.example:
        return example_spec(args.example)
    raise ValueError("one of --spec or --example is required")


def cmd_kappa(args) -> int:
    spec = _spec(args)
    r = spec.r_default if args.r is None else args.r
    sol = solve_kappa(spec, r)
    print(f"kappa_r = {sol.exponent:.6f}  (r = {r:g}, z0 = {sol.z:.12g}, residual = {sol.residual:.3g})")
    _write_json(args.out, "kappa.json", {"r": r, "kappa": sol.exponent, "z0": sol.z,
                                         "residual": sol.residual, "iterations": sol.iterations})
    return EXIT_OK


def cmd_pipeline(args) -> int:
    spec = _spec(args)
    rep = dimension_pipeline(spec, seed=args.seed, r=args.r, n_max=args.n_max or 1024,
                             depth=args.depth, lloyd=args.lloyd, restarts=args.restarts)
    for msg in rep.warnings:
        print(f"warning: {msg}", file=sys.stderr)
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "pipeline.csv"), "w") as fh:
        w = csv.writer(fh, delimiter=";", lineterminator="\n")
        w.writerow(["n", "V", "e_n"])
        for q, e in zip(rep.results, rep.dimension.e_n):
            w.writerow([q.n, repr(float(q.cost)), repr(float(e))])
    results_csv(rep.results, os.path.join(args.out, "quantizers.csv"))
    summary = rep.summary()
    summary.update(seed=args.seed, r=spec.r_default if args.r is None else args.r)
    _write_json(args.out, "pipeline.json", summary)
    print(f"kappa = {rep.kappa:.6f}  estimate = {rep.estimate:.6f}  abs_error = {rep.abs_error:.4f}"
          f"  (depth {rep.depth}, {rep.atoms} atoms)")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    k = args.example
    if k is None:
        raise ValueError("--example is required")
    report = reproduce_example(k, example_spec(k), seed=args.seed, r=args.r,
                               n_letters=args.n_max or 10_000)
    for key in sorted(report):
        print(f"{key}: {report[key]}")
    _write_json(args.out, f"reproduce_{k}.json", report)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", help="system description (JSON)")
    common.add_argument("--example", type=int, choices=EXAMPLE_IDS, help="bundled example system")
    common.add_argument("--r", type=float, default=None, help="quantization order (default: from the system file)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--depth", type=int, default=None, help="approximant depth (default: resolution rule)")
    common.add_argument("--n-max", type=int, default=None)
    common.add_argument("--restarts", type=int, default=16)
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--lloyd", action="store_true", help="use Lloyd instead of the exact 1-D solver")

    parser = argparse.ArgumentParser(prog="rifsquant", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("kappa", parents=[common], help="solve for the quantization dimension").set_defaults(func=cmd_kappa)
    sub.add_parser("pipeline", parents=[common], help="estimate the dimension from exact errors").set_defaults(
        func=cmd_pipeline)
    sub.add_parser("reproduce", parents=[common], help="verdicts for a bundled example").set_defaults(
        func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (RifsError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
