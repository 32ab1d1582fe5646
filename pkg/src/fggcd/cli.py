"""Command-line entry point.

Subcommands:
  run               execute a federated discovery experiment
  validate-dataset  structural checks on an exported dataset directory
  sweep             re-run an experiment across one parameter's values
  make-synthetic    write a small block-model dataset for demos/tests
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import ExperimentConfig
from .data import DatasetError, save_graph, validate_dataset
from .experiment import run_experiment, run_sweep
from .synthetic import make_sbm_graph


def _add_run_overrides(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--dataset", help="dataset directory")
    p.add_argument("--out", dest="out_dir", help="output directory")
    p.add_argument("--seed", type=int)
    p.add_argument("--rounds", type=int)
    p.add_argument("--clients", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--weight-decay", dest="weight_decay", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--lambda-hc", dest="lambda_hc", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--tau-sharp", dest="tau_sharp", type=float)
    p.add_argument("--tau-base", dest="tau_base", type=float)
    p.add_argument("--tau-density", dest="tau_density", type=float)
    p.add_argument("--k-max", dest="k_max", type=int)
    p.add_argument("--hidden-dim", dest="hidden_dim", type=int)
    p.add_argument("--embed-dim", dest="embed_dim", type=int)
    p.add_argument("--label-rate", dest="label_rate", type=float)
    p.add_argument("--sparsity-rate", dest="sparsity_rate", type=float)
    p.add_argument("--client-fraction", dest="client_fraction", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument("--no-gcl", dest="no_gcl", action="store_const", const=True)
    p.add_argument("--no-unsup", dest="no_unsup", action="store_const", const=True)
    p.add_argument("--no-trg", dest="no_trg", action="store_const", const=True)
    p.add_argument("--cannot-link", dest="cannot_link", action="store_const", const=True)


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    skip = ("command", "config", "verbose", "param", "values", "repeats")
    overrides = {k: v for k, v in vars(args).items() if k not in skip and v is not None}
    return cfg.with_overrides(overrides)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="fggcd")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one experiment")
    _add_run_overrides(run_p)

    val_p = sub.add_parser("validate-dataset", help="check an exported dataset")
    val_p.add_argument("directory")

    sweep_p = sub.add_parser("sweep", help="run an experiment per parameter value")
    _add_run_overrides(sweep_p)
    sweep_p.add_argument("--param", required=True, help="config field to vary")
    sweep_p.add_argument("--values", required=True, help="comma-separated values")
    sweep_p.add_argument("--repeats", type=int, default=1)

    synth_p = sub.add_parser("make-synthetic", help="write a synthetic block-model dataset")
    synth_p.add_argument("--out", required=True)
    synth_p.add_argument("--blocks", type=int, default=6)
    synth_p.add_argument("--block-size", type=int, default=50)
    synth_p.add_argument("--p-in", type=float, default=0.2)
    synth_p.add_argument("--p-out", type=float, default=0.01)
    synth_p.add_argument("--feature-dim", type=int, default=16)
    synth_p.add_argument("--noise", type=float, default=0.6)
    synth_p.add_argument("--seed", type=int, default=0)

    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        if args.command == "run":
            summary = run_experiment(_config_from_args(args))
            final = summary["final"]
            print(
                f"final round {final['round']}: old={final['old_acc']} new={final['new_acc']} "
                f"all={final['all_acc']} hrscore={final['hrscore']}"
            )
            return 0
        if args.command == "validate-dataset":
            info = validate_dataset(args.directory)
            print("ok: " + ", ".join(f"{k}={v}" for k, v in info.items()))
            return 0
        if args.command == "sweep":
            cfg = _config_from_args(args)
            rows = run_sweep(
                cfg, args.param, args.values.split(","), args.repeats, cfg.out_dir
            )
            for r in rows:
                print(
                    f"{r['param']}={r['value']}: hrscore {_pm(r['hrscore_mean'], r['hrscore_std'])} "
                    f"all {_pm(r['all_acc_mean'], r['all_acc_std'])} (n={r['repeats']})"
                )
            return 0
        if args.command == "make-synthetic":
            graph = make_sbm_graph(
                name=f"sbm{args.blocks}x{args.block_size}",
                block_sizes=tuple([args.block_size] * args.blocks),
                p_in=args.p_in,
                p_out=args.p_out,
                feature_dim=args.feature_dim,
                noise=args.noise,
                seed=args.seed,
            )
            save_graph(graph, args.out)
            print(f"wrote {graph.num_nodes} nodes / {graph.num_edges} edges to {args.out}")
            return 0
    except (DatasetError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2


def _pm(mean: float | None, std: float | None) -> str:
    if mean is None:
        return "-"
    return f"{mean:.2f}±{std:.2f}"


if __name__ == "__main__":
    sys.exit(main())
