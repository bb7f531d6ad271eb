"""Command-line pipeline: extract -> xvec -> split -> rank / series, plus synth,
bench and metrics.

Exit status is 0 on success, 1 on bad input or usage, 2 when a computation is
infeasible (for example brute force beyond its evaluation cap). Errors go to
standard error as a single ``error: ...`` line.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from ._io import dump_json, fmt, jsonable, read_csv, write_csv
from .community import (
    DEFAULT_ALPHA,
    DEFAULT_EPSILON,
    DEFAULT_MAX_SIZE,
    ego_net,
    ppr_community,
    read_class_file,
    write_subgraphs,
)
from .graph import GraphFormatError, load_graph
from .normality import (
    KERNELS,
    FocusVectorTable,
    contribution_vectors,
    read_focus_vectors,
    write_focus_vectors,
)
from .ranking import bootstrap_rank, contribution_series
from .synthbench import (
    LabeledNodeTable,
    SyntheticSpec,
    class_metrics,
    draw_vectors,
    ratio_experiment,
    runtime_bench,
)
from .welfare import DEFAULT_BRUTE_CAP, AttributePartition, InfeasibleError, build_bundles, run_algorithm

THREADS_ENV = "CLASSCONTRAST_THREADS"
log = logging.getLogger("classcontrast")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _str_list(text: str) -> list[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--threads", type=_positive_int, default=_default_threads(),
                        help=f"worker threads (default from ${THREADS_ENV}, else 1)")
    common.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])

    parser = _Parser(prog="classcontrast", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("extract", parents=[common], help="local subgraphs around seed nodes")
    p.add_argument("--edges", required=True)
    p.add_argument("--attrs", required=True)
    p.add_argument("--classes", required=True, help="seed file: node<TAB>class_id")
    p.add_argument("--method", choices=["ego", "ppr"], default="ppr")
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--eps", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--max-size", type=_positive_int, default=DEFAULT_MAX_SIZE)
    p.add_argument("--out", required=True)

    p = sub.add_parser("xvec", parents=[common], help="contribution vectors per subgraph")
    p.add_argument("--edges", required=True)
    p.add_argument("--attrs", required=True)
    p.add_argument("--subgraphs", required=True, help="subgraph_id<TAB>class_id<TAB>n1,n2,...")
    p.add_argument("--kernel", choices=KERNELS, default="product")
    p.add_argument("--out", required=True)

    p = sub.add_parser("split", parents=[common], help="partition attributes between classes")
    p.add_argument("--input", required=True, help="focus-vector CSV")
    p.add_argument("--algo", choices=["brute", "greedy", "swa", "simplified", "topk"], default="swa")
    p.add_argument("--k", type=_positive_int)
    p.add_argument("--swa-steps", type=_positive_int, default=100)
    p.add_argument("--swa-samples", type=_positive_int, default=32)
    p.add_argument("--swa-rounds", type=_positive_int, default=8)
    p.add_argument("--brute-cap", type=_positive_int, default=DEFAULT_BRUTE_CAP)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="JSON output path (default: stdout)")

    p = sub.add_parser("rank", parents=[common], help="bootstrap relative-contribution ranking")
    p.add_argument("--input", required=True)
    p.add_argument("--partition", required=True)
    p.add_argument("--fraction", type=float, default=0.9)
    p.add_argument("--reps", type=_positive_int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="report JSON")
    p.add_argument("--csv", help="plot-ready CSV (default: next to the report)")

    p = sub.add_parser("series", parents=[common], help="average contribution across snapshots")
    p.add_argument("inputs", nargs="+", help="focus-vector CSVs in snapshot order")
    p.add_argument("--attribute", action="append", help="restrict to these attributes (repeatable)")
    p.add_argument("--class-id", type=int, action="append", dest="class_ids")
    p.add_argument("--out", required=True)

    p = sub.add_parser("synth", parents=[common], help="synthetic focus vectors")
    p.add_argument("--scheme", choices=["normal", "adversarial"], default="normal")
    p.add_argument("--d", type=_positive_int, required=True)
    p.add_argument("--p", type=_positive_int, default=100)
    p.add_argument("--n", type=_positive_int, default=100)
    p.add_argument("--P", type=float, default=0.5, dest="P")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    bench = sub.add_parser("bench", help="synthetic benchmarks")
    bsub = bench.add_subparsers(dest="bench_command", required=True, parser_class=_Parser)
    p = bsub.add_parser("ratio", parents=[common], help="objective ratio to the optimum or best")
    p.add_argument("--d", type=_int_list, required=True, dest="ds")
    p.add_argument("--algos", type=_str_list, default=["swa", "simplified", "top3", "top5"])
    p.add_argument("--reps", type=_positive_int, default=10)
    p.add_argument("--scheme", choices=["normal", "adversarial"], default="normal")
    p.add_argument("--P", type=float, default=0.5, dest="P")
    p.add_argument("--swa-steps", type=_positive_int, default=100)
    p.add_argument("--swa-samples", type=_positive_int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p = bsub.add_parser("time", parents=[common], help="wall-clock runtime per algorithm")
    p.add_argument("--d", type=_int_list, required=True, dest="ds")
    p.add_argument("--algos", type=_str_list, default=["swa", "simplified", "greedy", "top5"])
    p.add_argument("--repeats", type=_positive_int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("metrics", parents=[common], help="class support / confidence of a ranking")
    p.add_argument("--edges", required=True)
    p.add_argument("--attrs", required=True)
    p.add_argument("--classes", required=True, help="node<TAB>class_id labels")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--report", help="report JSON written by 'rank'")
    src.add_argument("--ranking", help="CSV attribute,class_id,weight from any ranker")
    p.add_argument("--drop-unobserved", action="store_true",
                   help="leave never-observed attributes out instead of scoring them 0")
    p.add_argument("--out", required=True)
    return parser


def _inputs(*paths) -> list[str]:
    return [str(p) for p in paths]


def cmd_extract(args) -> None:
    graph = load_graph(args.edges, args.attrs)
    kind, entries = read_class_file(args.classes, graph)
    if kind != "seeds":
        raise ValueError(f"{args.classes}: extract needs seed rows node<TAB>class_id")

    def one(entry):
        node, labeled = entry
        if args.method == "ego":
            return ego_net(graph, node, labeled.class_id)
        return ppr_community(graph, node, args.alpha, args.eps, args.max_size, labeled.class_id)

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            subs = list(pool.map(one, entries))
    else:
        subs = [one(e) for e in entries]
    header = [f"inputs: {args.edges},{args.attrs},{args.classes}", f"method: {args.method}"]
    if args.method == "ppr":
        header.append(f"alpha: {args.alpha} eps: {args.eps} max_size: {args.max_size}")
    write_subgraphs(args.out, graph, subs, header)
    log.info("wrote %d subgraphs to %s", len(subs), args.out)


def cmd_xvec(args) -> None:
    graph = load_graph(args.edges, args.attrs)
    kind, subs = read_class_file(args.subgraphs, graph)
    if kind != "members":
        raise ValueError(f"{args.subgraphs}: xvec needs explicit member rows (run 'extract' first)")
    vectors, scale = contribution_vectors(graph, subs, args.kernel, threads=args.threads)
    table = FocusVectorTable.from_vectors(vectors, graph.attribute_names)
    meta = {"inputs": _inputs(args.edges, args.attrs, args.subgraphs), "kernel": args.kernel,
            "scale": fmt(scale)}
    write_focus_vectors(args.out, table, meta)
    log.info("%d vectors, %d low quality, scale %s", len(vectors), int(table.low_quality.sum()), fmt(scale))


def _bundles_from(path):
    table = read_focus_vectors(path)
    bundles, dropped = build_bundles(table.class_ids, table.x_hat, table.ids)
    return table, bundles, dropped


def cmd_split(args) -> dict:
    if args.k is not None and args.algo != "topk":
        raise UsageError("--k only applies to --algo topk")
    if args.algo == "topk" and args.k is None:
        raise UsageError("--algo topk requires --k")
    table, bundles, dropped = _bundles_from(args.input)
    part = run_algorithm(args.algo, bundles, k=args.k, steps=args.swa_steps, samples=args.swa_samples,
                         seed=args.seed, rounds=args.swa_rounds, cap=args.brute_cap)
    payload = {
        "algorithm": part.algorithm,
        "seed": args.seed,
        "objective_value": part.objective_value,
        "assignment": part.to_dict(table.attribute_names)["assignment"],
        "dropped_low_quality": dropped,
        "n_classes": part.n_classes,
        "k": part.k,
        "inputs": _inputs(args.input),
    }
    if args.algo == "swa":
        payload["parameters"] = {"steps": args.swa_steps, "samples": args.swa_samples,
                                 "rounds": args.swa_rounds}
    if args.out:
        dump_json(args.out, payload)
    else:
        json.dump(jsonable(payload), sys.stdout, indent=2)
        sys.stdout.write("\n")
    return payload


def cmd_rank(args) -> None:
    table, bundles, dropped = _bundles_from(args.input)
    with open(args.partition, encoding="utf-8") as fh:
        part = AttributePartition.from_dict(json.load(fh), table.attribute_names)
    if part.n_classes != len(bundles):
        raise ValueError(f"partition has {part.n_classes} classes, vectors have {len(bundles)}")
    report = bootstrap_rank(bundles, part, args.fraction, args.reps, args.seed,
                            table.attribute_names, threads=args.threads)
    payload = report.to_dict()
    payload["seed"] = args.seed
    payload["dropped_low_quality"] = dropped
    payload["inputs"] = _inputs(args.input, args.partition)
    dump_json(args.out, payload)
    csv_path = args.csv or str(Path(args.out).with_suffix(".csv"))
    write_csv(csv_path, ["class", "rank", "attribute", "rc_mean", "rc_std"], report.rows(),
              {"inputs": _inputs(args.input, args.partition), "seed": args.seed,
               "fraction": args.fraction, "reps": args.reps})


def cmd_series(args) -> None:
    snapshots = []
    for path in args.inputs:
        table, bundles, _ = _bundles_from(path)
        snapshots.append((bundles, table.attribute_names))
    names = args.attribute or list(snapshots[0][1])
    classes = args.class_ids if args.class_ids is not None else [b.class_id for b in snapshots[0][0]]
    rows = []
    for attr in names:
        for c in classes:
            for t, v in enumerate(contribution_series(snapshots, attr, c)):
                rows.append((t, c, attr, v))
    rows.sort(key=lambda r: (r[0], r[1]))
    write_csv(args.out, ["snapshot", "class", "attribute", "avg_contribution"], rows,
              {"inputs": _inputs(*args.inputs)})


def cmd_synth(args) -> None:
    spec = SyntheticSpec(args.scheme, args.d, args.p, args.n, args.P, args.seed)
    mats = draw_vectors(spec)
    x = np.vstack(mats)
    cids = np.repeat(np.arange(len(mats)), [m.shape[0] for m in mats])
    ids = [f"c{c}_{i}" for c, m in enumerate(mats) for i in range(m.shape[0])]
    table = FocusVectorTable(ids, cids, x, [f"a{i}" for i in range(args.d)])
    meta = {"scheme": args.scheme, "d": args.d, "p": args.p, "n": args.n, "seed": args.seed}
    if args.scheme == "adversarial":
        meta["P"] = args.P
    write_focus_vectors(args.out, table, meta)


def cmd_bench(args) -> None:
    if args.bench_command == "ratio":
        rows = ratio_experiment(args.ds, args.algos, args.reps, args.seed, args.scheme, args.P,
                                steps=args.swa_steps, samples=args.swa_samples)
        header = ["d", "algo", "reference", "reps", "mean_ratio", "std_ratio", "min_ratio", "mean_value"]
        meta = {"seed": args.seed, "scheme": args.scheme, "algos": args.algos, "reps": args.reps}
        if args.scheme == "adversarial":
            meta["P"] = args.P
    else:
        rows = runtime_bench(args.ds, args.algos, args.seed, args.repeats)
        header = ["d", "algo", "seconds", "median_seconds"]
        meta = {"seed": args.seed, "algos": args.algos, "repeats": args.repeats, "p": 100, "n": 100}
    write_csv(args.out, header, ([r[h] for h in header] for r in rows), meta)


def _ranking_weights(args, names) -> dict[int, dict[str, float]]:
    weights: dict[int, dict[str, float]] = {}
    if args.report:
        with open(args.report, encoding="utf-8") as fh:
            report = json.load(fh)
        for c, rows in report["classes"].items():
            # only attributes that actually favour the class carry weight
            weights[int(c)] = {r["attribute"]: max(float(r["rc_mean"]), 0.0) for r in rows}
        return weights
    header, rows, _ = read_csv(args.ranking)
    if [h.strip() for h in header[:3]] != ["attribute", "class_id", "weight"]:
        raise ValueError(f"{args.ranking}: expected header attribute,class_id,weight")
    for k, row in enumerate(rows, start=1):
        try:
            weights.setdefault(int(row[1]), {})[row[0]] = float(row[2])
        except (ValueError, IndexError):
            raise ValueError(f"{args.ranking}: bad data row {k}") from None
    return weights


def cmd_metrics(args) -> None:
    graph = load_graph(args.edges, args.attrs)
    kind, entries = read_class_file(args.classes, graph)
    if kind != "seeds":
        raise ValueError(f"{args.classes}: metrics needs node<TAB>class_id rows")
    labeled = {}
    for node, lab in entries:
        if labeled.setdefault(node, lab.class_id) != lab.class_id:
            raise ValueError(f"node {graph.node_names[node]!r} has two class labels")
    table = LabeledNodeTable.from_graph(graph, labeled)
    result = class_metrics(table, _ranking_weights(args, graph.attribute_names), args.drop_unobserved)
    rows = [(c, m["n_attributes"], m["weight_total"], m["cs_bar"], m["cc_bar"]) for c, m in result.items()]
    write_csv(args.out, ["class_id", "n_attributes", "weight_total", "cs_bar", "cc_bar"], rows,
              {"inputs": _inputs(args.edges, args.attrs, args.classes, args.report or args.ranking)})


COMMANDS = {
    "extract": cmd_extract,
    "xvec": cmd_xvec,
    "split": cmd_split,
    "rank": cmd_rank,
    "series": cmd_series,
    "synth": cmd_synth,
    "bench": cmd_bench,
    "metrics": cmd_metrics,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=getattr(args, "log_level", "WARNING"),
                            format="%(levelname)s %(name)s: %(message)s")
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InfeasibleError as exc:
        print(f"error: infeasible: {exc}", file=sys.stderr)
        return 2
    except (GraphFormatError, ValueError, KeyError, IndexError, OSError, json.JSONDecodeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
