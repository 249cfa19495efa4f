"""Command-line entry point.

Exit codes: 0 success, 1 input error, 2 failed verification.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .bench import (
    fit_scaling_exponent,
    format_rows,
    gnuplot_data,
    mean_queries_by_n,
    read_rows,
    reference_opt,
    run_mis_bench,
    run_sf_bench,
)
from .certify import BASES, build_certificate, full_preprocess, level_mis_sizes, verify_certificate
from .core import InputError, random_permutation
from .gen import KINDS, GenSpec
from .io import read_graph, read_instance, write_graph, write_instance
from .mis import alg_mul, alg_mul_hp, backend_name, rgmis_exact
from .steiner import estimate_sf

EXIT_OK, EXIT_INPUT, EXIT_FAIL = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _on_off(text):
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected on or off")
    return text == "on"


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None


def _params(items):
    out = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise InputError(f"parameter {item!r} must look like key=value")
        out[key] = val
    return out


def _common(defaults: bool) -> argparse.ArgumentParser:
    """Global flags; subcommands repeat them without defaults so either position works."""
    p = argparse.ArgumentParser(add_help=False)
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p.add_argument("--seed", type=int, default=d(0), help="random seed (default 0)")
    p.add_argument("--format", choices=("csv", "json"), default=d("csv"), help="report format")
    p.add_argument("--workers", type=int, default=d(1), help="trial worker processes")
    p.add_argument("--cache", type=_on_off, default=d(False), metavar="{on,off}",
                   help="memoize oracle answers within a run")
    return p


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj, fmt):
    if fmt == "json":
        return json.dumps(obj, indent=2, sort_keys=True) + "\n"
    keys = list(obj)
    return ",".join(keys) + "\n" + ",".join(str(obj[k]) for k in keys) + "\n"


def cmd_gen(args):
    spec = GenSpec(args.kind, _params(args.params), args.seed)
    try:
        obj = spec.build()
    except KeyError as exc:
        raise InputError(f"missing parameter {exc} for kind {args.kind}") from None
    writer = write_graph if args.kind == "gnp" else write_instance
    if args.out:
        writer(obj, args.out)
    else:
        from .io import format_graph, format_instance
        sys.stdout.write(format_graph(obj) if args.kind == "gnp" else format_instance(obj))
    return EXIT_OK


def cmd_mis_estimate(args):
    graph = read_graph(args.graph)
    n = graph.n
    if args.hp:
        est = alg_mul_hp(graph.fresh, n, args.eps, args.seed, cache=args.cache)
        queries = est.total_queries
    else:
        est = alg_mul(graph, n, args.eps, args.seed, cache=args.cache)
        queries = graph.queries
    row = est.record(args.seed)
    row["queries"] = queries
    row["backend"] = backend_name()
    if args.exact:
        row["exact"] = len(rgmis_exact(graph, est.permutation))
    _emit(_dump(row, args.format), args.out)
    return EXIT_OK


def cmd_sf_estimate(args):
    inst = read_instance(args.instance)
    rep = estimate_sf(inst, args.eps, args.seed, cache=args.cache)
    fmt = args.report or args.format
    if fmt == "json":
        body = dict(rep.summary(), levels=[lv.row() for lv in rep.levels])
        text = json.dumps(body, indent=2, sort_keys=True) + "\n"
    else:
        summary = rep.summary()
        summary["ignored_pairs"] = len(summary["ignored_pairs"])
        rows = [lv.row() for lv in rep.levels]
        cols = list(rows[0]) if rows else ["i"]
        text = _dump(summary, "csv") + "\n" + ",".join(cols) + "\n"
        text += "".join(",".join(str(r[c]) for c in cols) + "\n" for r in rows)
    _emit(text, args.out)
    return EXIT_OK


def verify_report(inst, seed: int, base: str = "cluster-mst") -> dict:
    pre = full_preprocess(inst)
    pi = random_permutation(inst.n, seed)
    cert = build_certificate(inst, pi=pi, pre=pre, base=base)
    report = verify_certificate(inst, cert)
    report["seed"] = seed
    report["scale"] = str(pre.scale)
    opt = None
    try:
        opt = reference_opt(inst, pre.kept_pairs)
    except InputError:
        pass
    report["opt"] = opt
    if opt is not None and pre.k_eff:
        sizes = level_mis_sizes(inst, pi, pre=pre)
        opt_scaled = Fraction(opt) * pre.scale
        lower = max(t * m for t, m in sizes)
        total = sum(t * m for t, m in sizes)
        report["sandwich"] = {"max_level": lower, "level_sum": total,
                              "opt_scaled": float(opt_scaled),
                              "lower_ok": lower <= opt_scaled,
                              "upper_ok": opt_scaled <= 6 * total}
        report["passed"] = bool(report["passed"] and lower <= opt_scaled <= 6 * total)
    return report


def cmd_verify(args):
    inst = read_instance(args.instance)
    report = verify_report(inst, args.seed, args.base)
    _emit(json.dumps(report, indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK if report["passed"] else EXIT_FAIL


def cmd_bench_mis(args):
    rows = run_mis_bench(args.sizes, args.p, args.eps, args.trials, args.seed,
                         workers=args.workers, cache=args.cache)
    _emit(format_rows(rows, args.format, wall_time=not args.no_wall_time), args.out)
    if args.gnuplot:
        Path(args.gnuplot).write_text(gnuplot_data(mean_queries_by_n(rows)))
    return EXIT_OK


def cmd_bench_sf(args):
    items = list(args.instances or [])
    for g in args.gen or []:
        kind, _, rest = g.partition(":")
        items.append(GenSpec(kind, _params(rest.split(",") if rest else []), args.seed))
    rows = run_sf_bench(items, args.eps, args.trials, args.seed, workers=args.workers,
                        cache=args.cache)
    _emit(format_rows(rows, args.format, wall_time=not args.no_wall_time), args.out)
    return EXIT_OK


def cmd_fit(args):
    rows = read_rows(Path(args.input).read_text())
    points = mean_queries_by_n(rows)
    slope = fit_scaling_exponent(points)
    if args.gnuplot:
        Path(args.gnuplot).write_text(gnuplot_data(points))
    _emit(_dump({"exponent": slope, "points": len(points)}, args.format), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _common(defaults=False)
    parser = _Parser(prog="sublinear-sf", parents=[_common(defaults=True)],
                     description="Sublinear RGMIS size and Steiner-Forest cost estimation.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", parents=[common], help="generate an instance or graph file")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--params", nargs="*", default=[], metavar="KEY=VALUE")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("mis-estimate", parents=[common], help="estimate |RGMIS| of a graph file")
    p.add_argument("--graph", required=True)
    p.add_argument("--eps", type=float, default=0.2)
    p.add_argument("--hp", action="store_true", help="run ceil(3 ln n) trials round-robin")
    p.add_argument("--exact", action="store_true", help="also report the exact size")
    p.add_argument("--out")
    p.set_defaults(func=cmd_mis_estimate)

    p = sub.add_parser("sf-estimate", parents=[common], help="estimate Steiner-Forest cost")
    p.add_argument("--instance", required=True)
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--report", choices=("csv", "json"))
    p.add_argument("--out")
    p.set_defaults(func=cmd_sf_estimate)

    p = sub.add_parser("verify", parents=[common], help="build and check a certificate")
    p.add_argument("--instance", required=True)
    p.add_argument("--base", choices=BASES, default="cluster-mst")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench-mis", parents=[common], help="G(n,p) query benchmark")
    p.add_argument("--sizes", type=_int_list, required=True, help="comma-separated n values")
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--eps", type=float, default=0.2)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--no-wall-time", action="store_true")
    p.add_argument("--gnuplot", help="write 'n mean_queries' data here")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench_mis)

    p = sub.add_parser("bench-sf", parents=[common], help="Steiner-Forest estimator benchmark")
    p.add_argument("--instances", nargs="*", help="instance files")
    p.add_argument("--gen", nargs="*", metavar="KIND:K=V,...", help="generated instances")
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--no-wall-time", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench_sf)

    p = sub.add_parser("fit", parents=[common], help="fit the query-scaling exponent")
    p.add_argument("--input", required=True, help="bench CSV or JSON-lines file")
    p.add_argument("--gnuplot")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
