"""Command-line entry point: ``logarrange {solve,eval,bench,generate}``.

Exit codes: 0 success, 1 a benchmark expectation failed, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import bench, generators
from .algebraic_distance import compute_couplings
from .arrangement import beta, cost, read_permutation, write_permutation
from .exceptions import ValidationError
from .graph import read_edge_list, un, write_edge_list
from .solver import PRESETS, SolverParams, solve

logger = logging.getLogger("logarrange")

EXIT_OK, EXIT_EXPECTATION, EXIT_USAGE = 0, 1, 2

# (flag, SolverParams field, type)
_OVERRIDE_FLAGS = (
    ("--theta1", "theta1", float),
    ("--theta2", "theta2", float),
    ("--omega", "omega", float),
    ("--R", "n_vectors", int),
    ("--jor-iters", "jor_iters", int),
    ("--order", "interp_order", int),
    ("--nn-k", "nn_k", int),
    ("--nn-passes", "nn_passes", int),
    ("--coarsest", "coarsest_size", int),
    ("--exact-threshold", "exact_threshold", int),
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def _add_graph_flags(p, required=True):
    p.add_argument("--input", required=required, help="edge list file (.gz allowed)")
    d = p.add_mutually_exclusive_group()
    d.add_argument("--directed", dest="directed", action="store_true", default=False)
    d.add_argument("--undirected", dest="directed", action="store_false")
    p.add_argument("--weighted", action="store_true", help="read a third weight column")
    p.add_argument("--volumes", help="file of 'node volume' lines")


def _add_solver_flags(p):
    p.add_argument("--preset", choices=sorted(PRESETS), default="default")
    for flag, dest, typ in _OVERRIDE_FLAGS:
        p.add_argument(flag, dest=dest, type=typ, default=None)
    p.add_argument("--sweeps", type=int, default=None,
                   help="sweeps of both compatible and Gauss-Seidel relaxation")
    p.add_argument("--seed", type=int, default=0)


def _solver_params(args):
    over = {dest: getattr(args, dest) for _, dest, _ in _OVERRIDE_FLAGS
            if getattr(args, dest) is not None}
    if args.sweeps is not None:
        over["compat_sweeps"] = over["gs_sweeps"] = args.sweeps
    return SolverParams.preset(args.preset, seed=args.seed, **over)


def build_parser():
    p = _Parser(prog="logarrange", description="Multiscale minimum logarithmic arrangement.")
    p.add_argument("--verbose", "-v", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="compute an ordering")
    _add_graph_flags(s)
    _add_solver_flags(s)
    s.add_argument("--out-perm", help="write the node id at each rank, one per line")
    s.add_argument("--report", help="write the run report here (default: stdout)")
    s.add_argument("--report-format", choices=("kv", "json"), default="kv")
    s.add_argument("--dump-couplings", metavar="PATH",
                   help="write top-level 'i j rho' coupling lines")
    s.add_argument("--verbose", "-v", action="count", default=0, dest="sub_verbose")

    e = sub.add_parser("eval", help="score an existing ordering")
    _add_graph_flags(e)
    e.add_argument("--perm", required=True, help="permutation file")
    e.add_argument("--report-format", choices=("kv", "json"), default="kv")

    b = sub.add_parser("bench", help="run a benchmark suite manifest")
    b.add_argument("--suite", required=True)
    b.add_argument("--data-dir", help="resolve relative graph paths here instead of next to the suite")
    b.add_argument("--repeat", type=int, default=1)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--error-samples", type=int, default=2000,
                   help="placement-error instances sampled per graph (0 disables)")
    b.add_argument("--errors-out", help="write the sorted error curve here")
    b.add_argument("--slope-range", type=float, nargs=2, metavar=("LO", "HI"),
                   help="fail unless the time-vs-size slope lies in [LO, HI]")
    _add_solver_flags(b)
    b.add_argument("--report-format", choices=("kv", "json"), default="kv")

    g = sub.add_parser("generate", help="write a synthetic graph as an edge list")
    g.add_argument("spec", help="e.g. grid:rows=100,cols=100 or pa:n=10000,m=3,seed=1")
    g.add_argument("--out", help="output path (default: stdout)")
    return p


def _load(args):
    if not os.path.exists(args.input):
        raise FileNotFoundError(f"no such file: {args.input}")
    if args.volumes and not os.path.exists(args.volumes):
        raise FileNotFoundError(f"no such file: {args.volumes}")
    return read_edge_list(args.input, weighted=args.weighted, directed=args.directed,
                          volumes=args.volumes)


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return ",".join(_fmt(x) for x in v)
    return str(v)


def _emit(rows, fmt, stream):
    """``rows`` is an ordered list of (key, value); timing keys start with ``time.``."""
    if fmt == "json":
        json.dump(dict(rows), stream, indent=2)
        stream.write("\n")
    else:
        for k, v in rows:
            stream.write(f"{k}={_fmt(v)}\n")


def solve_report(name, g, result):
    rows = [
        ("graph", name),
        ("n", g.n),
        ("m", g.m),
        ("total_weight", float(g.total_weight)),
        ("directed", g.directed),
        ("seed", result.params.seed),
        ("preset", result.params.name),
    ]
    rows += [(f"param.{k}", v) for k, v in result.params.to_dict().items()
             if k not in ("seed", "name")]
    rows += [
        ("cost", float(result.cost)),
        ("beta", float(result.beta)),
        ("levels", [lv["n"] for lv in result.levels]),
    ]
    rows += [(f"time.{k}", float(v)) for k, v in result.timings.items()]
    return rows


def _cmd_solve(args):
    g = _load(args)
    params = _solver_params(args)
    result = solve(g, params)
    if args.verbose or args.sub_verbose:
        for lv in result.levels:
            print(f"level {lv['level']}: n={lv['n']} m={lv['m']} volume={lv['volume']!r} "
                  f"weight={lv['weight']!r}", file=sys.stderr)
    if args.dump_couplings:
        work = un(g)
        rho = compute_couplings(work, params.n_vectors, params.jor_iters, params.omega,
                                params.seed)
        with open(args.dump_couplings, "w", encoding="utf-8") as fh:
            for i, j, r in rho.items():
                fh.write(f"{g.labels[i]} {g.labels[j]} {r!r}\n")
    if args.out_perm:
        with open(args.out_perm, "w", encoding="utf-8") as fh:
            write_permutation(result.arrangement, fh, g.labels)
    rows = solve_report(os.path.basename(args.input), g, result)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            _emit(rows, args.report_format, fh)
    else:
        _emit(rows, args.report_format, sys.stdout)
    return EXIT_OK


def _cmd_eval(args):
    g = _load(args)
    if not os.path.exists(args.perm):
        raise FileNotFoundError(f"no such file: {args.perm}")
    a = read_permutation(args.perm, g)
    c = cost(g, a)
    b = beta(g, a) if g.total_weight > 0 else 0.0
    rows = [("graph", os.path.basename(args.input)), ("n", g.n), ("m", g.m),
            ("total_weight", float(g.total_weight)), ("directed", g.directed),
            ("cost", float(c)), ("beta", float(b))]
    _emit(rows, args.report_format, sys.stdout)
    return EXIT_OK


# error relative to |exact| + 1 counted as small
ERROR_REL_THRESHOLD = 0.05


def _cmd_bench(args):
    if not os.path.exists(args.suite):
        raise FileNotFoundError(f"no such file: {args.suite}")
    entries = bench.load_manifest(args.suite, args.data_dir)
    params = _solver_params(args)
    results = bench.run_suite(entries, params, args.repeat, args.jobs, args.error_samples)
    rows = []
    failed = False
    sizes, times, errs, rels = [], [], [], []
    for r in results:
        pre = f"entry.{r['name']}"
        rows.append((f"{pre}.status", r["status"]))
        if r["status"] != "ok":
            rows.append((f"{pre}.reason", r["reason"]))
            continue
        rows += [(f"{pre}.n", r["n"]), (f"{pre}.m", r["m"]), (f"{pre}.beta", r["beta"]),
                 (f"{pre}.beta_natural", r["beta_natural"]),
                 (f"{pre}.beta_random", r["beta_random"]), (f"{pre}.ratio", r["ratio"]),
                 (f"{pre}.expected", r["expected"]), (f"time.{r['name']}", r["time"])]
        failed |= not r["expected"]
        sizes.append(r["size"])
        times.append(r["time"])
        if "errors" in r:
            errs.append(r["errors"])
            rels.append(r["errors_rel"])
    ok = [r for r in results if r["status"] == "ok"]
    rows += [("summary.entries", len(results)), ("summary.ok", len(ok)),
             ("summary.skipped", len(results) - len(ok)),
             ("summary.expected", sum(r["expected"] for r in ok)),
             ("summary.beats_baselines", sum(r["ratio"] <= 1.0 for r in ok))]
    if len(sizes) >= 2 and min(times) > 0:
        slope = bench.scaling_slope(sizes, times)
        rows.append(("time.slope", slope))
        if args.slope_range is not None:
            in_range = args.slope_range[0] <= slope <= args.slope_range[1]
            rows.append(("summary.slope_in_range", in_range))
            failed |= not in_range
    if errs:
        e = np.sort(np.concatenate(errs))
        rows += [("errors.count", len(e)), ("errors.min", float(e.min()) if len(e) else 0.0),
                 ("errors.zero_fraction", float(np.mean(e <= 0)) if len(e) else 1.0),
                 ("errors.median", float(np.median(e)) if len(e) else 0.0),
                 ("errors.max", float(e.max()) if len(e) else 0.0),
                 ("errors.within_rel", float(np.mean(np.concatenate(rels) <= ERROR_REL_THRESHOLD))
                  if len(e) else 1.0)]
        failed |= bool(len(e) and e.min() < 0)
        if args.errors_out:
            np.savetxt(args.errors_out, e, fmt="%.17g")
    _emit(rows, args.report_format, sys.stdout)
    return EXIT_EXPECTATION if failed else EXIT_OK


def _cmd_generate(args):
    g = generators.from_spec(args.spec)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            write_edge_list(g, fh)
    else:
        write_edge_list(g, sys.stdout)
    return EXIT_OK


_COMMANDS = {"solve": _cmd_solve, "eval": _cmd_eval, "bench": _cmd_bench,
             "generate": _cmd_generate}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    level = logging.WARNING - 10 * (args.verbose + getattr(args, "sub_verbose", 0))
    logging.basicConfig(level=max(level, logging.DEBUG), format="%(levelname)s %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except (FileNotFoundError, ValidationError, ValueError) as exc:
        print(f"logarrange: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
