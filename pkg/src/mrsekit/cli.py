"""``mrse-kit`` command line.

Exit codes: 0 on success, 2 for bad input (unreadable files, malformed data,
invalid flags), 3 when a stationary solver fails to converge.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys

from . import __version__
from .entropy import EntropyTerms, OBJECTIVES, objective_model
from .errors import ConvergenceError, InputError
from .experiment import EXPERIMENT_COLUMNS, ExperimentPlan, run_plan
from .graph import reduce_to_single
from .io import (
    _open_out,
    assignment_to_labels,
    ensure_parent,
    load_edge_list,
    read_assignment,
    write_assignment,
    write_csv,
    write_edge_list,
)
from .metrics import acc, ari, nmi
from .minimize import MinimizeConfig, hierarchical_minimize, minimize_2d, minimize_recursive
from .surfing import SurfConfig, stationary_csv_rows
from .synth import SynthConfig, generate_multi_ba, planted_partition
from .tree import EncodingTree, Partition

log = logging.getLogger("mrsekit")

THREADS_ENV = "MRSEKIT_THREADS"


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _objectives(text):
    items = [v.strip().lower() for v in text.split(",") if v.strip()]
    if items == ["all"]:
        return list(OBJECTIVES)
    bad = [v for v in items if v not in OBJECTIVES]
    if bad or not items:
        raise argparse.ArgumentTypeError(f"unknown objective(s) {bad}; choose from se, rsse, mrse, all")
    return items


def _surf(args) -> SurfConfig:
    return SurfConfig(args.teleport, args.tol, args.max_iter)


def _add_surf_flags(p):
    p.add_argument("--teleport", type=float, default=0.85, help="teleport constant c (default 0.85)")
    p.add_argument("--tol", type=float, default=1e-10, help="L1 convergence tolerance")
    p.add_argument("--max-iter", type=int, default=10000)


def _add_graph_flags(p):
    p.add_argument("graph", help="edge list (src dst rel [weight])")
    p.add_argument("--undirected", action="store_true",
                   help="read rows as undirected edges (overrides the file's directive)")


def _load(args):
    return load_edge_list(args.graph, directed=False if args.undirected else None)


def _read_partition(path, g) -> Partition:
    labels = assignment_to_labels(read_assignment(path), g.node_labels)
    return Partition.from_labels(labels.tolist())


def _config_of(args):
    skip = {"func", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# --- generate -------------------------------------------------------------------------------

def cmd_generate(args):
    if args.planted:
        sizes = args.sizes or [25] * 4
        g, labels = planted_partition(sizes, args.intra, args.inter, args.relations, args.seed)
        if args.labels:
            ensure_parent(args.labels)
            write_assignment(args.labels, g.node_labels, labels.tolist(), header="class")
    else:
        cfg = SynthConfig(args.nodes, args.m, args.sparsity, args.relations, args.seed)
        g = generate_multi_ba(cfg)
    ensure_parent(args.output)
    write_edge_list(g, args.output)
    log.info("wrote %d nodes, %d arcs, %d relation(s)", g.node_count, g.arc_count, g.relation_count)


# --- entropy --------------------------------------------------------------------------------

def cmd_entropy(args):
    g = _load(args)
    dims = [args.dim] if args.dim else ([1, 2] if args.partition else [1])
    if 2 in dims and not args.partition:
        raise InputError("--dim 2 needs --partition")
    part = _read_partition(args.partition, g) if args.partition else None
    cfg = _surf(args)
    rows = []
    stationary = []
    for obj in args.objective:
        om = objective_model(g, obj, cfg, args.reduction)
        if 1 in dims:
            rows.append((obj, 1, om.one_d, om.iterations))
        if 2 in dims:
            value = EntropyTerms(om.model, EncodingTree.from_partition(part)).objective()
            rows.append((obj, 2, value, om.iterations))
        if om.objective == "rsse":
            stationary += [("rsse", "node", lab, v)
                           for lab, v in stationary_csv_rows(g.node_labels, om.stationary.x)]
        elif om.objective == "mrse":
            stationary += [("mrse", "node", lab, v)
                           for lab, v in stationary_csv_rows(g.node_labels, om.stationary.x)]
            stationary += [("mrse", "relation", lab, v)
                           for lab, v in stationary_csv_rows(g.relation_names, om.stationary.y)]
    write_csv(args.output, ("metric", "dimension", "value", "iterations"), rows, _config_of(args))
    if args.export_stationary:
        ensure_parent(args.export_stationary)
        write_csv(args.export_stationary, ("metric", "kind", "label", "probability"),
                  stationary, _config_of(args))


# --- minimize -------------------------------------------------------------------------------

def cmd_minimize(args):
    g = _load(args)
    cfg = MinimizeConfig(objective=args.objective, strategy=args.strategy,
                         subgraph_size=args.subgraph_size, delta=args.delta, surf=_surf(args),
                         reduction=args.reduction)
    config = _config_of(args)
    if args.depth > 1:
        levels = minimize_recursive(g, args.depth, cfg)
        ensure_parent(args.output)
        with _open_out(args.output) as fh:
            fh.write("node\t" + "\t".join(f"level_{k + 1}" for k in range(len(levels))) + "\n")
            cols = [lv.labels() for lv in levels]
            for i, lab in enumerate(g.node_labels):
                fh.write(lab + "\t" + "\t".join(str(c[i]) for c in cols) + "\n")
        return
    if args.strategy == "hierarchical":
        res = hierarchical_minimize(g, cfg)
        if args.trace:
            ensure_parent(args.trace)
            write_csv(args.trace, ("pass", "subgraph_size", "groups", "merges", "clusters"),
                      [(k + 1, p.subgraph_size, p.groups, p.merges, p.clusters)
                       for k, p in enumerate(res.passes)], config)
    else:
        res = minimize_2d(g, cfg)
        if args.trace:
            ensure_parent(args.trace)
            rows = [(0, None, None, None, res.initial)]
            rows += [(s.step, s.cluster_a, s.cluster_b, s.delta, s.objective) for s in res.trace]
            write_csv(args.trace, ("step", "cluster_a", "cluster_b", "delta", "objective"),
                      rows, config)
    ensure_parent(args.output)
    write_assignment(args.output, g.node_labels, res.partition.labels().tolist())
    log.info("%s: 1D %.6f, 2D %.6f, %d communities", args.objective, res.one_d, res.objective,
             len(res.partition))


# --- eval -----------------------------------------------------------------------------------

def cmd_eval(args):
    pred = read_assignment(args.partition)
    truth = read_assignment(args.labels)
    nodes = list(pred)
    p = assignment_to_labels(pred, nodes)
    t = assignment_to_labels(truth, nodes)
    rows = [("nmi", nmi(p, t)), ("ari", ari(p, t)), ("acc", acc(p, t))]
    write_csv(args.output, ("metric", "value"), rows, _config_of(args))


# --- reduce ---------------------------------------------------------------------------------

def cmd_reduce(args):
    g = _load(args)
    single = reduce_to_single(g, args.mode)
    ensure_parent(args.output)
    write_edge_list(single.as_multi(), args.output)


# --- experiment -----------------------------------------------------------------------------

def _threads(args):
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get(THREADS_ENV, "").strip()
    if not env:
        return 1
    try:
        return max(1, int(env))
    except ValueError:
        raise InputError(f"{THREADS_ENV} must be an integer, got {env!r}")


def cmd_experiment(args):
    cast = float if args.axis == "sparsity" else int
    grid = tuple(cast(v) for v in args.grid.split(",") if v.strip())
    template = SynthConfig(args.nodes, args.m, args.sparsity, args.relations, 0)
    mcfg = MinimizeConfig(strategy=args.strategy, subgraph_size=args.subgraph_size,
                          delta=args.delta, surf=_surf(args))
    plan = ExperimentPlan(args.axis, grid, args.seeds, tuple(args.objectives), template, mcfg,
                          args.seed, timing=not args.no_timing)
    rows = run_plan(plan, _threads(args))
    ensure_parent(args.output)
    write_csv(args.output, EXPERIMENT_COLUMNS, rows, plan.describe())
    failed = sum(1 for r in rows if r[-1] != "ok")
    if failed:
        log.warning("%d of %d rows failed", failed, len(rows))


# --- parser ---------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mrse-kit",
        description="Structural entropy (SE), random-surfing SE and multi-relational SE "
                    "on edge-list graphs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic graph")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--ba", action="store_true", help="Barabasi-Albert relations (default)")
    mode.add_argument("--planted", action="store_true", help="planted-partition graph")
    p.add_argument("-n", "--nodes", type=int, default=100)
    p.add_argument("-m", type=int, default=3, help="BA edges per arriving node")
    p.add_argument("--sparsity", type=float, default=None, help="drop edges down to this sparsity")
    p.add_argument("--relations", type=int, default=1)
    p.add_argument("--sizes", type=_int_list, default=None, help="planted community sizes, e.g. 25,25,25,25")
    p.add_argument("--intra", type=float, default=0.3)
    p.add_argument("--inter", type=float, default=0.02)
    p.add_argument("--labels", default=None, help="ground-truth output (planted mode)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("entropy", help="1D and 2D entropy values")
    _add_graph_flags(p)
    p.add_argument("--objective", type=_objectives, default=list(OBJECTIVES),
                   help="se, rsse, mrse, a comma list, or all (default)")
    p.add_argument("--dim", type=int, choices=(1, 2), default=None)
    p.add_argument("--partition", default=None, help="node-to-community file defining a 2-level tree")
    p.add_argument("--reduction", choices=("presence", "weight-sum"), default="presence",
                   help="how SE/RSSE collapse several relations")
    p.add_argument("--export-stationary", default=None, metavar="CSV")
    p.add_argument("-o", "--output", default="-")
    _add_surf_flags(p)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("minimize", help="greedy 2D minimization (community detection)")
    _add_graph_flags(p)
    p.add_argument("--objective", choices=OBJECTIVES, default="mrse")
    p.add_argument("--strategy", choices=("vanilla", "hierarchical"), default="vanilla")
    p.add_argument("-n", "--subgraph-size", type=int, default=100)
    p.add_argument("--delta", choices=("exact", "paper"), default="exact")
    p.add_argument("--depth", type=int, default=1, help="levels of recursive contraction")
    p.add_argument("--reduction", choices=("presence", "weight-sum"), default="presence")
    p.add_argument("-o", "--output", default="-", help="partition file")
    p.add_argument("--trace", default=None, metavar="CSV")
    _add_surf_flags(p)
    p.set_defaults(func=cmd_minimize)

    p = sub.add_parser("eval", help="NMI, ARI and ACC of a partition against labels")
    p.add_argument("--partition", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("reduce", help="collapse a multi-relational graph to one relation")
    _add_graph_flags(p)
    p.add_argument("--mode", choices=("presence", "weight-sum"), default="presence")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("experiment", help="sweep synthetic BA graphs")
    p.add_argument("--axis", choices=("size", "relations", "sparsity"), required=True)
    p.add_argument("--grid", required=True, help="comma-separated axis values")
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--objectives", type=_objectives, default=list(OBJECTIVES))
    p.add_argument("-n", "--nodes", type=int, default=300)
    p.add_argument("-m", type=int, default=3)
    p.add_argument("--relations", type=int, default=3)
    p.add_argument("--sparsity", type=float, default=None)
    p.add_argument("--strategy", choices=("vanilla", "hierarchical"), default="vanilla")
    p.add_argument("--subgraph-size", type=int, default=100)
    p.add_argument("--delta", choices=("exact", "paper"), default="exact")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None,
                   help=f"worker processes (default: ${THREADS_ENV} or 1)")
    p.add_argument("--no-timing", action="store_true", help="leave wall_time empty")
    p.add_argument("-o", "--output", default="-")
    _add_surf_flags(p)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        args.func(args)
    except ConvergenceError as exc:
        print(f"mrse-kit: {exc}", file=sys.stderr)
        return 3
    except (InputError, OSError) as exc:
        print(f"mrse-kit: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
