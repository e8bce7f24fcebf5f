"""``matchdec`` command line.

Exit codes: 0 success, 1 usage error, 2 decode or infeasibility error,
3 I/O or input-format error.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__, bench, blossom
from .codes import repetition_code, toric_2d, toric_3d_phenomenological
from .decoder import Decoder
from .exceptions import DecodeError, GraphValidationError
from .fileio import format_bits, read_check_matrix, read_graph, read_syndrome, write_graph
from .graph import from_check_matrix

EXIT_OK, EXIT_USAGE, EXIT_DECODE, EXIT_IO = 0, 1, 2, 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def _neighbours(text: str):
    if text.lower() == "all":
        return None
    if text == bench.PER_DEFECT:
        return text
    try:
        m = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer or 'all', got {text!r}")
    if m < 1:
        raise argparse.ArgumentTypeError("neighbour count must be positive")
    return m


def _add_code_args(p, multi=False):
    nargs = "+" if multi else None
    p.add_argument("--code", choices=bench.CODES, default="toric2d")
    p.add_argument("--L", type=int, nargs=nargs, default=[8] if multi else 8,
                   help="lattice size (code length for rep)")
    p.add_argument("--T", type=int, default=None, help="measurement rounds (toric3d; default L)")
    p.add_argument("--p", type=float, nargs=nargs, default=[0.1] if multi else 0.1)
    p.add_argument("--q", type=float, default=None, help="measurement error rate (default p)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="matchdec", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("decode", help="decode one syndrome")
    src = d.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph", help="graph file")
    src.add_argument("--check-matrix", help="check-matrix file")
    d.add_argument("--syndrome", required=True, help="0/1 syndrome file, one entry per node")
    d.add_argument("--neighbours", type=_neighbours, default=30, help="m, or 'all' for exact")
    d.add_argument("--weight", action="store_true", help="also print the matching weight")

    b = sub.add_parser("bench", help="Monte Carlo experiments")
    bsub = b.add_subparsers(dest="experiment", required=True, parser_class=_Parser)
    for name in ("logical", "threshold", "approx", "timing"):
        e = bsub.add_parser(name)
        _add_code_args(e, multi=(name == "threshold"))
        if name == "approx":
            e.add_argument("--m", type=_neighbours, nargs="+", default=[5, 10, 15, 20])
        else:
            e.add_argument("--m", type=_neighbours, default=None, help="m, or 'all' (default)")
        e.add_argument("--trials", type=int, default=1000)
        e.add_argument("--seed", type=int, default=0)
        e.add_argument("--workers", type=int, default=1)
        e.add_argument("--noise-p", type=float, default=None,
                       help="sample noise at this rate instead of p")
        e.add_argument("--out", default="-", help="output file, '-' for stdout")
        e.add_argument("--format", choices=("csv", "json-lines"), default="csv")

    g = sub.add_parser("gen", help="write a built-in code's matching graph")
    _add_code_args(g)
    g.add_argument("--out", required=True)

    w = sub.add_parser("mwpm", help="solve MWPM on a graph file and print the certificate status")
    w.add_argument("--graph", required=True)
    return parser


def _config(args, **over) -> bench.ExperimentConfig:
    kw = dict(code=args.code, L=args.L, p=args.p, T=args.T, q=args.q,
              num_neighbours=args.m, trials=args.trials, seed=args.seed, workers=args.workers,
              noise_p=args.noise_p)
    kw.update(over)
    return bench.ExperimentConfig(**kw)


def _cmd_decode(args) -> int:
    if args.graph:
        graph = read_graph(args.graph)
    else:
        graph = from_check_matrix(read_check_matrix(args.check_matrix))
    try:
        s = read_syndrome(args.syndrome)
    except ValueError as exc:
        raise OSError(str(exc)) from exc
    checks = graph.num_nodes - len(graph.boundary_nodes)
    if s.size not in (graph.num_nodes, checks):
        raise _UsageError(f"syndrome has {s.size} entries; expected {graph.num_nodes} "
                          f"(all nodes) or {checks} (non-boundary nodes)")
    m = args.neighbours if args.neighbours != bench.PER_DEFECT else max(int(s.sum()), 1)
    c, weight = Decoder(graph, m).decode(s, return_weight=True)
    print(format_bits(c))
    if args.weight:
        print(f"weight {weight!r}")
    return EXIT_OK


def _cmd_bench(args) -> int:
    exp = args.experiment
    if exp == "threshold":
        cfg = _config(args, L=args.L[0], p=args.p[0])
        stats = bench.run_threshold_scan(cfg, args.L, args.p, rounds=args.T, q=args.q)
    elif exp == "approx":
        stats = bench.run_approximation_error(_config(args, num_neighbours=None), args.m)
    elif exp == "timing":
        cfg = _config(args)
        stats = [bench.run_timing(cfg)]
    else:
        cfg = _config(args)
        stats = [bench.run_logical_error(cfg)]
    out = sys.stdout if args.out == "-" else args.out
    bench.emit_results(stats, out, args.format, config=vars(args))
    return EXIT_OK


def _cmd_gen(args) -> int:
    if args.code == "rep":
        code = repetition_code(args.L, args.p)
    elif args.code == "toric2d":
        code = toric_2d(args.L, args.p)
    else:
        code = toric_3d_phenomenological(args.L, args.T or args.L, args.p,
                                         args.p if args.q is None else args.q)
    write_graph(code.graph, args.out)
    return EXIT_OK


def _cmd_mwpm(args) -> int:
    g = read_graph(args.graph, validate=False)
    wg = blossom.WeightedGraph(g.num_nodes, [(e.u, e.v, e.weight) for e in g.edges])
    result = blossom.solve_mwpm(wg, with_certificate=True)
    for u, v in result.pairs:
        print(f"{u} {v}")
    print(f"weight {result.total_weight!r}")
    problems = blossom.check_certificate(wg, result)
    print("certificate ok" if not problems else "certificate FAILED: " + "; ".join(problems))
    return EXIT_OK if not problems else EXIT_DECODE


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {"decode": _cmd_decode, "bench": _cmd_bench, "gen": _cmd_gen,
                   "mwpm": _cmd_mwpm}[args.command]
        return handler(args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except DecodeError as exc:
        print(f"matchdec: decode error: {exc}", file=sys.stderr)
        return EXIT_DECODE
    except (OSError, GraphValidationError) as exc:
        print(f"matchdec: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        # bad parameter values that argparse types cannot see (p range, L, ...)
        print(f"matchdec: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
