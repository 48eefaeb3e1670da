"""Command-line interface: ``orderflow {build,verify,member,mle,bayes}``.

Summaries go to standard output.  Structured results (JSON, DOT, LP) are
written only to the file named by ``--out``.

Exit codes: 0 success or inside, 1 input/output problem, 2 internal
consistency failure, 3 cap exceeded, 4 outside the polytope.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import flowpoly, networks, optim, projections, relations, stats
from .errors import (CapExceededError, DegeneratePriorError, DimensionMismatchError,
                     IncompatibleDataError, InternalVerificationError, NotAnOrderError,
                     OrderflowError)
from .relations import OrderKind

EXIT_OK = 0
EXIT_IO = 1
EXIT_INTERNAL = 2
EXIT_CAP = 3
EXIT_OUTSIDE = 4

SEED_ENV = "ORDERFLOW_SEED"


class _Parser(argparse.ArgumentParser):
    # usage errors share the input/output code so 2 stays reserved for internal failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_IO, f"{self.prog}: error: {message}\n")


def _kind(value):
    try:
        return OrderKind.parse(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(value):
    v = int(value)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="orderflow", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, need_n=True):
        if need_n:
            p.add_argument("--n", type=_positive_int, required=True, help="number of alternatives")
        p.add_argument("--kind", type=_kind, required=True, help="lo, wo, io or so")
        p.add_argument("--cap-override", type=_positive_int, default=None,
                       help="raise the size cap on n for this run")

    def solver(p):
        p.add_argument("--tol", type=float, default=None,
                       help="membership tolerance on the Euclidean distance")
        p.add_argument("--max-iters", type=_positive_int, default=None)

    p = sub.add_parser("build", help="build a network and export it")
    common(p)
    p.add_argument("--format", choices=("json", "dot", "lp"), default="json")
    p.add_argument("--out", default=None, help="output file (nothing is written without it)")

    p = sub.add_parser("verify", help="check that projected paths are exactly the orders")
    common(p)

    p = sub.add_parser("member", help="distance from a point to the order polytope")
    common(p)
    p.add_argument("--in", dest="infile", required=True, help="pair-map or relation JSON")
    p.add_argument("--out", default=None)
    solver(p)

    p = sub.add_parser("mle", help="maximum-likelihood choice probabilities")
    common(p, need_n=False)
    p.add_argument("--in", dest="infile", required=True, help="choice-count JSON")
    p.add_argument("--out", default=None)
    solver(p)

    p = sub.add_parser("bayes", help="encompassing-prior Bayes factor")
    common(p, need_n=False)
    p.add_argument("--in", dest="infile", required=True, help="choice-count JSON")
    p.add_argument("--out", default=None)
    p.add_argument("--samples", type=_positive_int, default=stats.BayesConfig.sample_count)
    p.add_argument("--seed", type=int, default=None,
                   help=f"random seed (default: ${SEED_ENV} if set, else 0)")
    solver(p)
    return parser


def resolve_seed(flag, environ=None) -> int:
    """The ``--seed`` flag if given, else ``$ORDERFLOW_SEED``, else 0."""
    if flag is not None:
        return int(flag)
    environ = os.environ if environ is None else environ
    raw = environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _solver_config(args, **extra):
    kw = dict(extra)
    if getattr(args, "tol", None) is not None:
        kw["membership_tolerance"] = args.tol
    if getattr(args, "max_iters", None) is not None:
        kw["max_iterations"] = args.max_iters
    return optim.SolverConfig(**kw)


def _write(path, text):
    if path is None:
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _network(args, n):
    net = networks.build_network(n, args.kind, cap=args.cap_override)
    return net, projections.build_projection(net)


def _fmt_vector(n, p):
    return ", ".join(f"({i},{j})={v:.6g}" for (i, j), v in zip(relations.pair_list(n), p))


def read_point(obj, n=None) -> np.ndarray:
    """Pair vector from ``{"n", "p": {"i,j": v}}`` or a relation ``{"n", "pairs"}``.

    Pairs missing from a pair map default to 0.
    """
    if not isinstance(obj, dict) or "n" not in obj:
        raise ValueError("point file must be a JSON object with an 'n' field")
    m = int(obj["n"])
    if n is not None and m != n:
        raise DimensionMismatchError(f"point file has n={m}, --n is {n}")
    if "p" in obj:
        index = {f"{i},{j}": k for k, (i, j) in enumerate(relations.pair_list(m))}
        p = np.zeros(relations.pair_dimension(m))
        for key, v in obj["p"].items():
            norm = key.replace(" ", "")
            if norm not in index:
                raise ValueError(f"unknown pair {key!r} for n={m}")
            p[index[norm]] = float(v)
        return p
    if "pairs" in obj:
        return relations.characteristic_vector(relations.Relation.from_json(obj))
    raise ValueError("point file needs a 'p' map or a 'pairs' list")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_build(args) -> int:
    net = networks.build_network(args.n, args.kind, cap=args.cap_override)
    nodes_formula = networks.count_nodes_formula(args.n, args.kind)
    arcs_expected = networks.expected_arc_count(args.n, args.kind)
    print(f"kind={args.kind.name.lower()} n={args.n}")
    print(f"|N|={net.num_nodes} (formula {nodes_formula})")
    line = f"|A|={net.num_arcs} (formula {arcs_expected})"
    if args.kind is OrderKind.SEMI:
        line += f" (published closed form {networks.count_arcs_formula(args.n, args.kind)})"
    print(line)
    if args.out is not None:
        if args.format == "json":
            text = _dump(net.to_json())
        elif args.format == "dot":
            text = net.to_dot()
        else:
            text = flowpoly.canonical_description(net).to_lp()
        _write(args.out, text)
        print(f"wrote {args.format} to {args.out}")
    if net.num_nodes != nodes_formula or net.num_arcs != arcs_expected:
        print("count mismatch", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


def verify_network(n, kind, cap=None) -> dict:
    """Enumerate paths, decode and project them, and compare with the orders.

    Returns a report with counts and a boolean ``passed``.
    """
    kind = OrderKind.parse(kind)
    orders = relations.enumerate_orders(n, kind, cap=cap)
    net = networks.build_network(n, kind, cap=cap)
    proj = projections.build_projection(net)
    paths = flowpoly.enumerate_paths(net)
    decoded = set()
    images = set()
    bad_decode = 0
    for path in paths:
        r = flowpoly.decode_path(net, path)
        if not relations.is_order(r, kind):
            bad_decode += 1
        decoded.add(r)
        img = proj.path_image(path)
        if not np.array_equal(img, relations.characteristic_vector(r)):
            bad_decode += 1
        images.add(img.astype(np.int8).tobytes())
    order_images = {relations.characteristic_vector(r).astype(np.int8).tobytes() for r in orders}
    return {
        "n": n,
        "kind": kind.name.lower(),
        "nodes": net.num_nodes,
        "arcs": net.num_arcs,
        "paths": len(paths),
        "vertices": len(images),
        "orders": len(orders),
        "decode_failures": bad_decode,
        "passed": bad_decode == 0 and images == order_images and decoded == set(orders),
    }


def cmd_verify(args) -> int:
    rep = verify_network(args.n, args.kind, cap=args.cap_override)
    print(f"kind={rep['kind']} n={rep['n']} |N|={rep['nodes']} |A|={rep['arcs']}")
    print(f"paths={rep['paths']} projected vertices={rep['vertices']} orders={rep['orders']}")
    if rep["decode_failures"]:
        print(f"decode failures: {rep['decode_failures']}")
    print("pass" if rep["passed"] else "FAIL")
    return EXIT_OK if rep["passed"] else EXIT_INTERNAL


def cmd_member(args) -> int:
    p = read_point(_read_json(args.infile), args.n)
    net, proj = _network(args, args.n)
    cfg = _solver_config(args)
    m = optim.membership_distance(net, proj, p, cfg)
    print(f"distance={m.distance:.10g} (lower bound {m.distance_lower_bound:.10g})")
    print(f"nearest: {_fmt_vector(args.n, m.nearest)}")
    print(f"solver: {m.result.status} after {m.result.iterations} iterations, gap {m.result.gap:.3g}")
    print("inside" if m.inside else "outside")
    _write(args.out, _dump(m.to_json()))
    return EXIT_OK if m.inside else EXIT_OUTSIDE


def cmd_mle(args) -> int:
    data = stats.ChoiceData.from_json(_read_json(args.infile))
    stats.check_compatible(data, args.kind)
    net, proj = _network(args, data.n)
    res = optim.fit_mle(net, proj, data, _solver_config(args))
    print(f"log-likelihood={res.log_likelihood:.10g}")
    print(f"gap={res.gap:.3g} status={res.status} iterations={res.iterations}")
    print(f"p: {_fmt_vector(data.n, res.p)}")
    _write(args.out, res.dumps() + "\n")
    return EXIT_OK


def cmd_bayes(args) -> int:
    data = stats.ChoiceData.from_json(_read_json(args.infile))
    stats.check_compatible(data, args.kind)
    seed = resolve_seed(args.seed)
    bcfg_kw = dict(sample_count=args.samples, seed=seed)
    if args.tol is not None:
        bcfg_kw["membership_tolerance"] = args.tol
    bcfg = stats.BayesConfig(**bcfg_kw)
    net, proj = _network(args, data.n)
    res = stats.bayes_factor(net, proj, data, bcfg, _solver_config(args))
    print(f"bf={res.bf:.10g} mc_stderr={res.mc_stderr:.3g}")
    print(f"prior hits={res.prior_hits}/{res.sample_count} "
          f"posterior hits={res.posterior_hits}/{res.sample_count} seed={seed}")
    report = res.to_json()
    report.update(seed=seed, kind=args.kind.name.lower(), n=data.n)
    _write(args.out, _dump(report))
    return EXIT_OK


COMMANDS = {
    "build": cmd_build,
    "verify": cmd_verify,
    "member": cmd_member,
    "mle": cmd_mle,
    "bayes": cmd_bayes,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except InternalVerificationError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError,
            NotAnOrderError, IncompatibleDataError, DimensionMismatchError,
            DegeneratePriorError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OrderflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
