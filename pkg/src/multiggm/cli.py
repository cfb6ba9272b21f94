"""Command-line entry point: simulate / fit / evaluate / summarize."""

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import io as io_mod
from .dataset import Dataset
from .errors import (ConfigError, EmptyGroup, MultiggmError, ParseError,
                     SchemaError)
from .metrics import (auc, betweenness, clustering_coefficient, confusion,
                      confusion_from_counts, disruption_codes, hub_nodes)
from .sampler import (Hyperparameters, RunControls, acceptance_rates,
                      run_chains)
from .selection import chain_agreement, compute_mpp, median_model
from .simulation import SimulationScenario, build_scenario

EXIT_CONFIG = 2
EXIT_PARSE = 3
EXIT_RUNTIME = 4

HP_FIELDS = ("nu0", "nu1", "lam", "alpha", "beta", "a", "b", "d", "f",
             "eta", "kappa", "u", "theta_step", "phi_step")


def _add_common(p):
    p.add_argument("--config", help="JSON file whose keys override flag defaults")
    p.add_argument("--output-dir", default=".", help="directory for outputs")
    p.add_argument("--seed", type=int, default=0)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="multiggm",
        description="Joint Bayesian inference of networks across sample "
                    "groups and data platforms")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate ground truth and data")
    _add_common(p)
    p.add_argument("--scenario", required=True, help="scenario JSON file")

    p = sub.add_parser("fit", help="run the MCMC sampler on a dataset")
    _add_common(p)
    p.add_argument("--manifest", required=True, help="dataset manifest JSON")
    p.add_argument("--iterations", type=int, default=30000,
                   help="post-burn-in iterations per chain")
    p.add_argument("--burnin", type=int, default=10000)
    p.add_argument("--chains", type=int, default=2)
    p.add_argument("--thinning", type=int, default=1)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--strict", action="store_true",
                   help="force sequential execution for exact reproduction")
    p.add_argument("--mpp-threshold", type=float, default=0.5)
    p.add_argument("--check-pd", action="store_true",
                   help="Cholesky-check every precision matrix each sweep")
    p.add_argument("--progress-every", type=int, default=1000)
    for name in HP_FIELDS:
        p.add_argument(f"--{name.replace('_', '-')}", type=float, default=None,
                       help=f"override hyperparameter {name}")

    p = sub.add_parser("evaluate", help="score fitted graphs against truth")
    _add_common(p)
    p.add_argument("--summary-dir", action="append", required=True,
                   help="fit output directory (repeat for replicates)")
    p.add_argument("--truth-dir", action="append", required=True,
                   help="simulate output directory (repeat, or one for all)")

    p = sub.add_parser("summarize", help="graph summaries of fitted networks")
    _add_common(p)
    p.add_argument("--summary-dir", required=True)
    p.add_argument("--hub-degree", type=int, default=4)
    p.add_argument("--mpp-threshold", type=float, default=None,
                   help="re-threshold MPP matrices instead of stored edges")
    return parser


def _apply_config(parser, argv):
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        with open(args.config) as fh:
            cfg = json.load(fh)
        cli_keys = {a.replace("--", "").replace("-", "_").split("=")[0]
                    for a in argv if a.startswith("--")}
        for key, val in cfg.items():
            attr = key.replace("-", "_")
            if not hasattr(args, attr):
                raise ConfigError(f"unknown config key {key!r}")
            if attr not in cli_keys:  # explicit flags beat the config file
                setattr(args, attr, val)
    return args


def _hyperparameters(args):
    overrides = {name: getattr(args, name) for name in HP_FIELDS
                 if getattr(args, name, None) is not None}
    return Hyperparameters(**overrides)


def cmd_simulate(args):
    with open(args.scenario) as fh:
        raw = json.load(fh)
    raw.pop("schema", None)
    if "seed" not in raw:
        raw["seed"] = args.seed
    try:
        scenario = SimulationScenario(**raw)
    except TypeError as e:
        raise ConfigError(f"bad scenario file: {e}") from e
    truth = build_scenario(scenario)
    out = args.output_dir
    os.makedirs(out, exist_ok=True)
    platform_names = [f"platform{s + 1}" for s in range(scenario.S)]
    group_names = [f"group{k + 1}" for k in range(scenario.K)]
    var_names = [f"v{i + 1}" for i in range(scenario.p)]
    csv_paths = []
    for s, pn in enumerate(platform_names):
        paths = []
        for k, gn in enumerate(group_names):
            io_mod.write_matrix_csv(
                os.path.join(out, f"truth_adj_{pn}_{gn}.csv"),
                truth.adjacency[s][k], var_names)
            io_mod.write_matrix_csv(
                os.path.join(out, f"truth_prec_{pn}_{gn}.csv"),
                truth.precision[s][k], var_names)
            data_name = f"data_{pn}_{gn}.csv"
            io_mod.write_matrix_csv(os.path.join(out, data_name),
                                    truth.data[s][k], var_names)
            paths.append(data_name)
        csv_paths.append(paths)
    io_mod.write_manifest(os.path.join(out, "manifest.json"),
                          platform_names, group_names, csv_paths)
    with open(os.path.join(out, "scenario.json"), "w") as fh:
        json.dump({**raw, "seed": scenario.seed}, fh, indent=2)
    print(f"wrote ground truth and data for {scenario.S} platforms x "
          f"{scenario.K} groups to {out}")
    return 0


def fit_dataset(data: Dataset, hp, total_iterations, burnin, chains=2,
                thinning=1, seed=0, threads=1, check_pd=False,
                mpp_threshold=0.5, progress_every=0):
    """Run chains, pool them, and compute the cross-chain agreement."""
    def progress(it, total, rates):
        snap = " ".join(f"{k}={v:.2f}" for k, v in rates.items() if not math.isnan(v))
        print(f"[multiggm] iteration {it}/{total} accept: {snap}", file=sys.stderr)

    controls = RunControls(iterations=total_iterations, burnin=burnin,
                           thinning=thinning, seed=seed, check_pd=check_pd,
                           progress=progress if progress_every else None,
                           progress_every=progress_every)
    traces = run_chains(data, hp, controls, chains=chains, threads=threads)
    summary = compute_mpp(traces, threshold=mpp_threshold)
    agreement = None
    if chains >= 2:
        agreement = chain_agreement(compute_mpp([traces[0]]),
                                    compute_mpp([traces[1]]))
    return traces, summary, agreement


def cmd_fit(args):
    if args.iterations <= 0:
        raise ConfigError("iterations must be positive")
    if args.chains < 1:
        raise ConfigError("chains must be >= 1")
    hp = _hyperparameters(args)
    data = io_mod.load_dataset(args.manifest)
    threads = 1 if args.strict else args.threads
    t0 = time.time()
    traces, summary, agreement = fit_dataset(
        data, hp, args.burnin + args.iterations, args.burnin,
        chains=args.chains, thinning=args.thinning, seed=args.seed,
        threads=threads, check_pd=args.check_pd,
        mpp_threshold=args.mpp_threshold, progress_every=args.progress_every)
    if agreement is None:
        print("warning: single chain; no cross-chain agreement computed",
              file=sys.stderr)
    meta = {
        "seed": args.seed,
        "chains": args.chains,
        "iterations": args.iterations,
        "burnin": args.burnin,
        "thinning": args.thinning,
        "strict": args.strict,
        "hyperparameters": hp.__dict__,
        "acceptance_rates": [acceptance_rates(t.accept) for t in traces],
        "chain_agreement": agreement,
        "runtime_seconds": time.time() - t0,
    }
    io_mod.write_results(summary, args.output_dir, meta=meta)
    if agreement is not None:
        print(f"chain agreement (MPP Pearson correlation): {agreement:.4f}")
    print(f"results written to {args.output_dir}")
    return 0


def _evaluate_run(summary_dir, truth_dir):
    summary = io_mod.read_summary_dir(summary_dir)
    per_graph = {}
    counts = [0, 0, 0, 0]
    scores, labels = [], []
    for (pn, gn), sel in summary["selected"].items():
        truth, _ = io_mod.read_data_csv(
            os.path.join(truth_dir, f"truth_adj_{pn}_{gn}.csv"))
        cm = confusion(sel, truth)
        mpp = summary["mpp"][(pn, gn)]
        rows, cols = np.triu_indices(truth.shape[0], 1)
        scores.append(mpp[rows, cols])
        labels.append(truth[rows, cols] != 0)
        per_graph[(pn, gn)] = {"tpr": cm.tpr, "fpr": cm.fpr, "mcc": cm.mcc,
                               "auc": auc(mpp, truth)}
        counts[0] += cm.tp
        counts[1] += cm.fp
        counts[2] += cm.tn
        counts[3] += cm.fn
    agg = confusion_from_counts(*counts)
    scores, labels = np.concatenate(scores), np.concatenate(labels)
    aggregate = {"tpr": agg.tpr, "fpr": agg.fpr, "mcc": agg.mcc,
                 "auc": auc(scores, labels.astype(int))}
    return per_graph, aggregate


def cmd_evaluate(args):
    truth_dirs = args.truth_dir
    if len(truth_dirs) == 1:
        truth_dirs = truth_dirs * len(args.summary_dir)
    if len(truth_dirs) != len(args.summary_dir):
        raise ConfigError("need one truth dir, or one per summary dir")
    replicates = []
    for sdir, tdir in zip(args.summary_dir, truth_dirs):
        per_graph, aggregate = _evaluate_run(sdir, tdir)
        replicates.append(aggregate)
        print(f"# {sdir}")
        for (pn, gn), m in sorted(per_graph.items()):
            print(f"  {pn}/{gn}: TPR {m['tpr']:.3f}  FPR {m['fpr']:.3f}  "
                  f"MCC {m['mcc']:.3f}  AUC {m['auc']:.3f}")
        print(f"  aggregate: TPR {aggregate['tpr']:.3f}  FPR {aggregate['fpr']:.3f}  "
              f"MCC {aggregate['mcc']:.3f}  AUC {aggregate['auc']:.3f}")
    if len(replicates) > 1:
        r = len(replicates)
        print(f"# mean (standard error) over {r} replicates")
        cells = []
        for key in ("tpr", "fpr", "mcc", "auc"):
            vals = np.array([m[key] for m in replicates])
            se = vals.std(ddof=1) / math.sqrt(r)
            cells.append(f"{vals.mean():.3f} ({se:.4f})")
        print("  TPR {}  FPR {}  MCC {}  AUC {}".format(*cells))
    report = {"replicates": replicates}
    if args.output_dir != ".":
        os.makedirs(args.output_dir, exist_ok=True)
        with open(os.path.join(args.output_dir, "metrics.json"), "w") as fh:
            json.dump(report, fh, indent=2)
    return 0


def cmd_summarize(args):
    summary = io_mod.read_summary_dir(args.summary_dir)
    meta = summary["meta"]
    selected = summary["selected"]
    if args.mpp_threshold is not None:
        selected = {key: (m > args.mpp_threshold).astype(np.int8)
                    for key, m in summary["mpp"].items()}
    print(f"{'':12s}{'Edges':>8s}{'Clustering':>12s}{'Betweenness':>13s}{'Hubs':>6s}")
    for pn in meta["platforms"]:
        for gn in meta["groups"]:
            g = selected[(pn, gn)]
            n_edges = int(np.triu(g, 1).sum())
            _, avg_bc = betweenness(g)
            hubs = hub_nodes(g, args.hub_degree) if n_edges else []
            print(f"{pn}/{gn:<12s}{n_edges:>6d}{clustering_coefficient(g):>12.4f}"
                  f"{avg_bc:>13.4f}{len(hubs):>6d}")
    print()
    header = ["Platform", "Total Pairs", "100", "110", "011", "001",
              "Total Disrupted"]
    print("  ".join(header))
    for pn in meta["platforms"]:
        graphs = [selected[(pn, gn)] for gn in meta["groups"]]
        _, summ = disruption_codes(graphs)
        row = [pn, str(summ["Total Pairs"])]
        for pattern in ("100", "110", "011", "001"):
            row.append(str(summ.get(pattern, 0)))
        row.append(str(summ["Total Disrupted"]))
        print("  ".join(row))
    return 0


COMMANDS = {"simulate": cmd_simulate, "fit": cmd_fit,
            "evaluate": cmd_evaluate, "summarize": cmd_summarize}


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        return COMMANDS[args.command](args)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_CONFIG
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (ParseError, SchemaError, EmptyGroup, FileNotFoundError,
            json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except MultiggmError as e:
        print(f"sampler failure: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
