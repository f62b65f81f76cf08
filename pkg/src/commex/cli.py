"""Command-line entry point: ``commex <subcommand> ...``.

Exit codes: 0 success, 1 input error (including a graph with no edges where a
score needs them), 2 convergence or infeasibility error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .blockmodel import (check_consistency_conditions, interior_stationary_point,
                         population_grid_argmax)
from .criteria import ADJUSTED, ORIGINAL
from .errors import (ConvergenceError, DegenerateError, InfeasibleError, InputError,
                     UndefinedScoreError)
from .evaluation import match_and_score
from .graph import (AVERAGE_DIRECTED, UNDIRECTED, labels_for, load_labels, parse_id,
                    read_edge_list)
from .harness import boxplot_svg, load_scenario, run_scenario, summarize, write_csv
from .partition import leading_eigenvector_split, sequential_modularity_partition
from .pipeline import ExtractionResult, extract_sequence
from .tabu import TabuConfig

log = logging.getLogger("commex")


def _tabu_args(p):
    p.add_argument("--restarts", type=int, default=10, help="tabu starts per search (default 10)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tenure", type=int, default=None)
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)


def _cfg(args) -> TabuConfig:
    return TabuConfig(tenure=args.tenure, max_iters=args.max_iters, restarts=args.restarts,
                      seed=args.seed, workers=args.workers)


def _graph(args):
    mode = AVERAGE_DIRECTED if getattr(args, "directed", False) else UNDIRECTED
    return read_edge_list(args.edges, mode)


def cmd_extract(args) -> int:
    g = _graph(args)
    res = extract_sequence(g, args.criterion, _cfg(args), min_size=args.min_size,
                           max_communities=args.max_communities)
    for c in res.communities:
        members = " ".join(str(g.labels[i]) for i in sorted(c.members))
        print(f"community {c.rank}: size {len(c.members)} score {c.score:.6g}: {members}")
    print(f"background: {len(res.background)} node(s)")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(res.to_json(g.labels) + "\n")
    return 0


def cmd_partition(args) -> int:
    g = _graph(args)
    part = sequential_modularity_partition(g, _cfg(args), max_k=args.max_k)
    print(f"# K={part.k} modularity={part.modularity:.6f}")
    for i, c in enumerate(part.assignment):
        print(f"{g.labels[i]} {c}")
    if args.eigvec:
        split = leading_eigenvector_split(g)
        with open(args.eigvec, "w", encoding="utf-8") as fh:
            fh.write(f"# leading eigenvalue {split.eigval_estimate:.10g}\n")
            for i, x in enumerate(split.eigvec):
                fh.write(f"{g.labels[i]} {x:.10g}\n")
    return 0


def cmd_simulate(args) -> int:
    with open(args.scenario, encoding="utf-8") as fh:
        sc = load_scenario(fh)
    if args.reps is not None:
        sc = replace(sc, reps=args.reps)
    rows = run_scenario(sc, workers=args.workers)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_csv(rows, fh)
    else:
        write_csv(rows, sys.stdout)
    for method, s in summarize(rows).items():
        print(f"{method:>10}: PPV {s['ppv'][0]:.3f} ({s['ppv'][1]:.3f})  "
              f"NPV {s['npv'][0]:.3f} ({s['npv'][1]:.3f})  n={s['n']}", file=sys.stderr)
    if args.plot:
        with open(args.plot, "w", encoding="utf-8") as fh:
            fh.write(boxplot_svg(rows, title=sc.id))
    return 0


def cmd_score(args) -> int:
    g = _graph(args)
    with open(args.labels, encoding="utf-8") as fh:
        truth = labels_for(g, load_labels(fh))
    with open(args.result, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as err:
            raise InputError(f"{args.result}: not valid JSON: {err}") from None
    res = ExtractionResult.from_dict(doc, g)
    print("rank size ppv npv matched_class")
    for c in res.communities:
        m = match_and_score(c.members, truth, args.background)
        print(f"{c.rank} {m.size} {m.ppv:.4f} {m.npv:.4f} {m.matched_class}")
    return 0


def cmd_verify(args) -> int:
    ok = check_consistency_conditions(args.p11, args.p12, args.p22)
    print(f"p11={args.p11} p12={args.p12} p22={args.p22} pi={args.pi} step={args.step}")
    print(f"consistency conditions: {'hold' if ok else 'violated'}")
    try:
        t1, t2 = interior_stationary_point(args.p11, args.p12, args.p22)
        print(f"interior stationary point: t1*={t1:.6f} t2*={t2:.6f} (sum {t1 + t2:.12f})")
    except DegenerateError as err:
        print(f"interior stationary point: none ({err})")
    for crit in (ORIGINAL, ADJUSTED):
        r = population_grid_argmax(crit, args.pi, args.p11, args.p12, args.p22, args.step)
        at_truth = np.isclose(r.t1, 1) and np.isclose(r.t2, 1) and r.unique
        flag = "" if r.unique else " [not unique]"
        print(f"{crit:>9} grid argmax: ({r.t1:.4f}, {r.t2:.4f}) value {r.value:.6g}{flag}"
              f" -> {'truth recovered' if at_truth else 'truth NOT recovered'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="commex", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="sequential community extraction")
    p.add_argument("edges")
    p.add_argument("--criterion", choices=[ORIGINAL, ADJUSTED], default=ADJUSTED)
    p.add_argument("--min-size", type=int, default=5)
    p.add_argument("--max-communities", type=int, default=None)
    p.add_argument("--directed", action="store_true",
                   help="edges are directed; average the two directions")
    p.add_argument("--json", metavar="OUT")
    _tabu_args(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("partition", help="sequential modularity partition")
    p.add_argument("edges")
    p.add_argument("--max-k", type=int, default=None)
    p.add_argument("--eigvec", metavar="OUT", help="write leading eigenvector components")
    p.add_argument("--directed", action="store_true")
    _tabu_args(p)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("simulate", help="run a block-model scenario")
    p.add_argument("scenario")
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--out", metavar="CSV")
    p.add_argument("--plot", metavar="SVG")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("score", help="PPV/NPV of an extraction result against true labels")
    p.add_argument("edges")
    p.add_argument("labels")
    p.add_argument("result")
    p.add_argument("--background", type=parse_id, default=None, help="label of background nodes")
    p.add_argument("--directed", action="store_true")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("verify-theory", help="check the population criteria on a grid")
    p.add_argument("--p11", type=float, default=0.5)
    p.add_argument("--p12", type=float, default=0.05)
    p.add_argument("--p22", type=float, default=0.4)
    p.add_argument("--pi", type=float, default=0.3)
    p.add_argument("--step", type=float, default=0.01)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (InfeasibleError, ConvergenceError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (InputError, UndefinedScoreError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
