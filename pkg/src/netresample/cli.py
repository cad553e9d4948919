"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
Every subcommand writes its outputs atomically into --out together with a
provenance.json recording the tool version and the exact configuration.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys

from . import __version__
from ._fileio import atomic_write, write_json, write_tsv
from .analysis import (centrality, communities, differential,
                       read_weighted_graph)
from .dataio import load_dataset
from .ensemble import run_ensemble_ggm, write_consensus
from .errors import DataError, NumericalError
from .graphlets import (gdvm_signed, gdvm_unsigned, read_graph_tsv,
                        write_gdvm, write_signed_gdvm)
from .pcnet import run_ensemble_pc, write_bn_stats
from .resampling import dump_indices, make_plan

RESAMPLING_NAMES = {
    "bootstrap": "bootstrap",
    "subsample": "subsample",
    "stratified-bootstrap": "stratified_bootstrap",
    "stratified-subsample": "stratified_subsample",
    "cluster-bootstrap": "cluster_bootstrap",
    "fractional-cluster-bootstrap": "fractional_cluster_bootstrap",
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _build_parser() -> _Parser:
    parser = _Parser(prog="netresample", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    ggm = sub.add_parser("infer-ggm", parents=[_ensemble_parent()],
                         help="consensus partial-correlation network")
    group = ggm.add_mutually_exclusive_group()
    group.add_argument("--lambda", dest="lambda_value", type=float,
                       metavar="F", help="fixed glasso penalty")
    group.add_argument("--lambda-scale", type=float, default=0.2, metavar="F",
                       help="penalty as a multiple of the empty-graph "
                            "threshold (default 0.2)")
    ggm.add_argument("--tau", type=float, required=True,
                     help="consensus frequency threshold")
    ggm.add_argument("--alpha", type=float, required=True,
                     help="CI / significance level")

    pc = sub.add_parser("infer-pc", parents=[_ensemble_parent()],
                        help="PC-stable skeleton/orientation frequencies")
    pc.add_argument("--alpha", type=float, required=True,
                    help="conditional-independence test level")
    pc.add_argument("--max-cond", type=int, required=True,
                    help="largest conditioning-set size")
    pc.add_argument("--tau", type=float, required=True,
                    help="consensus frequency threshold")

    gl = sub.add_parser("graphlets", help="graphlet degree vector matrices")
    gl.add_argument("--graph", required=True, help="edge-list TSV")
    gl.add_argument("--signed", action="store_true",
                    help="also write the signed GDVM")
    gl.add_argument("--out", required=True)
    gl.add_argument("--threads", type=int, required=True)

    an = sub.add_parser("analyze", help="centrality / community detection")
    an.add_argument("--graph", required=True, help="edge-list TSV")
    an.add_argument("--centrality", action="store_true")
    an.add_argument("--communities", action="store_true")
    an.add_argument("--seed", type=int, default=None)
    an.add_argument("--out", required=True)

    cmp_ = sub.add_parser("compare", help="differential connectivity")
    cmp_.add_argument("--a", required=True, help="first infer-ggm output dir")
    cmp_.add_argument("--b", required=True, help="second infer-ggm output dir")
    cmp_.add_argument("--permutations", type=int, default=0)
    cmp_.add_argument("--seed", type=int, default=0)
    cmp_.add_argument("--out", required=True)
    return parser


def _ensemble_parent() -> _Parser:
    parent = _Parser(add_help=False)
    parent.add_argument("--data", required=True, help="data matrix TSV")
    parent.add_argument("--meta", default=None, help="sample metadata TSV")
    parent.add_argument("--resampling", required=True,
                        choices=sorted(RESAMPLING_NAMES))
    parent.add_argument("--B", dest="b", type=int, required=True,
                        help="replicate count")
    parent.add_argument("--subsample-fraction", type=float, default=0.8)
    parent.add_argument("--cluster-fraction", type=float, default=0.8)
    parent.add_argument("--seed", type=int, required=True)
    parent.add_argument("--threads", type=int, required=True)
    parent.add_argument("--out", required=True)
    parent.add_argument("--keep-replicates", action="store_true")
    return parent


def _provenance(args, extra=None) -> dict:
    config = {k: v for k, v in sorted(vars(args).items()) if k != "subcommand"}
    record = {
        "tool": "netresample",
        "version": __version__,
        "subcommand": args.subcommand,
        "config": config,
    }
    if extra:
        record.update(extra)
    return record


def _cmd_infer_ggm(args) -> int:
    dataset = load_dataset(args.data, args.meta)
    plan = make_plan(RESAMPLING_NAMES[args.resampling], args.b, dataset,
                     args.seed, subsample_fraction=args.subsample_fraction,
                     cluster_fraction=args.cluster_fraction)
    cn = run_ensemble_ggm(dataset, plan, lambda_value=args.lambda_value,
                          lambda_scale=args.lambda_scale, tau=args.tau,
                          alpha=args.alpha, threads=args.threads,
                          keep_replicates=args.keep_replicates)
    os.makedirs(args.out, exist_ok=True)
    write_consensus(cn, args.out)
    if args.keep_replicates:
        with atomic_write(os.path.join(args.out, "indices.tsv")) as fh:
            dump_indices(plan, dataset, fh)
    write_json(os.path.join(args.out, "provenance.json"),
               _provenance(args, {"lambda": cn.lam, "n_valid": cn.n_valid}))
    print(f"{len(cn.graph_edges)} consensus edges "
          f"({len(cn.edges)} pairs ever selected, {cn.n_valid}/{cn.b} "
          f"valid replicates) -> {args.out}", file=sys.stderr)
    return 0


def _cmd_infer_pc(args) -> int:
    dataset = load_dataset(args.data, args.meta)
    plan = make_plan(RESAMPLING_NAMES[args.resampling], args.b, dataset,
                     args.seed, subsample_fraction=args.subsample_fraction,
                     cluster_fraction=args.cluster_fraction)
    stats = run_ensemble_pc(dataset, plan, alpha=args.alpha,
                            max_cond=args.max_cond, tau=args.tau,
                            threads=args.threads,
                            keep_replicates=args.keep_replicates)
    os.makedirs(args.out, exist_ok=True)
    write_bn_stats(stats, args.out)
    if args.keep_replicates:
        with atomic_write(os.path.join(args.out, "indices.tsv")) as fh:
            dump_indices(plan, dataset, fh)
    write_json(os.path.join(args.out, "provenance.json"),
               _provenance(args, {"n_valid": stats.n_valid}))
    print(f"{len(stats.consensus_skeleton())} consensus skeleton edges "
          f"({stats.n_valid}/{stats.b} valid replicates) -> {args.out}",
          file=sys.stderr)
    return 0


def _cmd_graphlets(args) -> int:
    if args.threads < 1:
        raise _UsageError("--threads must be >= 1")
    graph = read_graph_tsv(args.graph)
    os.makedirs(args.out, exist_ok=True)
    counts = gdvm_unsigned(graph)
    with atomic_write(os.path.join(args.out, "gdvm.tsv")) as fh:
        write_gdvm(graph, counts, fh)
    if args.signed:
        scounts = gdvm_signed(graph)
        with atomic_write(os.path.join(args.out, "gdvm_signed.tsv")) as fh:
            write_signed_gdvm(graph, scounts, counts, fh)
    write_json(os.path.join(args.out, "provenance.json"), _provenance(args))
    return 0


def _cmd_analyze(args) -> int:
    if not args.centrality and not args.communities:
        raise _UsageError("nothing to do: pass --centrality and/or "
                          "--communities")
    if args.communities and args.seed is None:
        raise _UsageError("--communities requires --seed")
    names, edges = read_weighted_graph(args.graph)
    os.makedirs(args.out, exist_ok=True)
    if args.centrality:
        rep = centrality(names, edges)
        write_tsv(os.path.join(args.out, "centrality.tsv"),
                  ("node", "degree", "strength", "betweenness"),
                  ((names[v], int(rep.degree[v]), float(rep.strength[v]),
                    float(rep.betweenness[v])) for v in range(len(names))))
    if args.communities:
        ca = communities(names, edges, seed=args.seed)
        write_tsv(os.path.join(args.out, "communities.tsv"),
                  ("node", "community"),
                  ((names[v], int(ca.labels[v])) for v in range(len(names))))
    write_json(os.path.join(args.out, "provenance.json"), _provenance(args))
    return 0


def _load_consensus_dir(path, need_replicates):
    consensus_path = os.path.join(path, "consensus.json")
    if not os.path.exists(consensus_path):
        raise DataError(f"{path}: no consensus.json (expected an infer-ggm "
                        "output directory)")
    with open(consensus_path, encoding="utf-8") as fh:
        doc = json.load(fh)
    names = tuple(doc["var_names"])
    index = {name: k for k, name in enumerate(names)}
    freq = {}
    for e in doc["edges"]:
        i, j = index[e["source"]], index[e["target"]]
        freq[(min(i, j), max(i, j))] = float(e["freq"])
    replicates = None
    if need_replicates:
        rep_dir = os.path.join(path, "replicates")
        if not os.path.isdir(rep_dir):
            raise DataError(f"{path}: permutation test needs replicates/ "
                            "(rerun infer-ggm with --keep-replicates)")
        replicates = {}
        for fname in sorted(os.listdir(rep_dir)):
            m = re.fullmatch(r"theta_r(\d+)\.tsv", fname)
            if not m:
                continue
            pairs = []
            with open(os.path.join(rep_dir, fname), encoding="utf-8") as fh:
                fh.readline()
                for line in fh:
                    src, tgt, _theta, _pcor = line.rstrip("\r\n").split("\t")
                    i, j = index[src], index[tgt]
                    pairs.append((min(i, j), max(i, j)))
            replicates[int(m.group(1))] = pairs
    return names, freq, replicates, int(doc["b"])


def _cmd_compare(args) -> int:
    need_rep = args.permutations > 0
    names_a, freq_a, rep_a, b_a = _load_consensus_dir(args.a, need_rep)
    names_b, freq_b, rep_b, b_b = _load_consensus_dir(args.b, need_rep)
    if need_rep and b_a != b_b:
        raise DataError(f"permutation test needs equal replicate counts "
                        f"(got B={b_a} and B={b_b})")
    report = differential(names_a, freq_a, names_b, freq_b, rep_a=rep_a,
                          rep_b=rep_b, n_perm=args.permutations,
                          seed=args.seed)
    os.makedirs(args.out, exist_ok=True)
    names = report.names
    write_tsv(os.path.join(args.out, "differential.tsv"),
              ("node", "dc", "pval"),
              ((names[v], float(report.dc[v]),
                None if report.pvals is None else float(report.pvals[v]))
               for v in range(len(names))))
    write_tsv(os.path.join(args.out, "differential_edges.tsv"),
              ("source", "target", "dfreq"),
              ((names[i], names[j], float(d))
               for (i, j), d in zip(report.pairs, report.dfreq)))
    write_json(os.path.join(args.out, "provenance.json"), _provenance(args))
    return 0


_COMMANDS = {
    "infer-ggm": _cmd_infer_ggm,
    "infer-pc": _cmd_infer_pc,
    "graphlets": _cmd_graphlets,
    "analyze": _cmd_analyze,
    "compare": _cmd_compare,
}


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.subcommand](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        print("run 'netresample <subcommand> --help' for usage",
              file=sys.stderr)
        return 1
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
