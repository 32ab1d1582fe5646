"""Federated round loop: broadcast, parallel client rounds, server
aggregation and discovery, global evaluation, artifact persistence."""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .client import ClientContext, ClientReport, LossSettings, bootstrap_report, run_client_round
from .config import ExperimentConfig
from .data import ROLE_UNLABELED, Graph, gcd_split, load_graph, sparsify_labels
from .louvain import Partition, louvain_partition
from .metrics import MetricsReport, evaluate_split, predict
from .model import GcnModel, encode, normalized_adjacency
from .rng import rng_for
from .server import (
    GlobalMemory,
    aggregate_prototypes,
    aggregate_weights,
    build_discovery_pool,
    discover_categories,
    initialize_memory,
)

log = logging.getLogger(__name__)


def build_client_contexts(graph: Graph, partition: Partition, masks) -> list[ClientContext]:
    contexts = []
    for cid, nodes in enumerate(partition.client_nodes):
        edges = partition.client_edges[cid]
        contexts.append(
            ClientContext(
                client_id=cid,
                features=graph.features[nodes],
                adj=normalized_adjacency(nodes.size, edges),
                edges=edges,
                labels=graph.labels[nodes],
                roles=masks.roles[nodes],
            )
        )
    return contexts


def loss_settings_from(config: ExperimentConfig) -> LossSettings:
    """Loss wiring including the ablation switches: no_gcl zeroes the
    contrastive weight, no_unsup drops the pseudo-label flow, and no_trg
    makes the unsupervised gate ignore reliability scores (aggregation
    weights still use the measured scores)."""
    return LossSettings(
        tau=config.tau,
        tau_sharp=config.tau_sharp,
        alpha=config.alpha,
        beta=0.0 if config.no_gcl else config.beta,
        include_unsup=not config.no_unsup,
        uniform_tpr_weights=config.no_trg,
        eps=config.eps,
    )


def _global_test_pool(
    contexts: list[ClientContext],
    partition: Partition,
    graph: Graph,
    params: list[np.ndarray],
    eps: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Embeddings and true labels of every unlabeled (test) node, embedded
    with the current global model inside each client's subgraph."""
    model_z = []
    labels = []
    for ctx, nodes in zip(contexts, partition.client_nodes):
        model = GcnModel.from_param_arrays(params)
        z = encode(model, ctx.adj, ctx.features, eps).data
        test_local = np.flatnonzero(ctx.roles == ROLE_UNLABELED)
        model_z.append(z[test_local])
        labels.append(graph.labels[nodes[test_local]])
    return np.vstack(model_z), np.concatenate(labels)


def run_experiment(config: ExperimentConfig, round_callback=None) -> dict:
    """Execute the full experiment; `round_callback(round, memory, reports)`
    is invoked after each server pass (used by invariant checks)."""
    config.validate()
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    graph = load_graph(config.dataset)
    partition = louvain_partition(graph, config.clients, config.seed)
    masks = gcd_split(graph, partition, config.label_rate, config.seed)
    if config.sparsity_rate > 0:
        masks = sparsify_labels(masks, partition, config.sparsity_rate, config.seed)
    contexts = build_client_contexts(graph, partition, masks)
    settings = loss_settings_from(config)

    global_model = GcnModel(
        graph.num_features, config.hidden_dim, config.embed_dim, rng_for(config.seed, "init")
    )
    global_params = global_model.param_arrays()

    boot_reports = [bootstrap_report(ctx, global_params, config.eps) for ctx in contexts]
    memory = initialize_memory(boot_reports, masks.known_classes, config.eps)

    metrics_path = out_dir / "metrics.csv"
    losses_path = out_dir / "losses.csv"
    metrics_rows: list[MetricsReport] = []
    with open(metrics_path, "w") as mf, open(losses_path, "w") as lf:
        mf.write(MetricsReport.CSV_HEADER + "\n")
        lf.write("round,client,loss_sup,loss_unsup,loss_gcl\n")

        for t in range(1, config.rounds + 1):
            start = time.perf_counter()
            memory.round = t

            participants = _sample_participants(config, t)
            prototypes = memory.prototype_matrix()
            class_to_row = memory.class_to_row()
            known_ids = list(memory.known_class_ids)
            known_rows = memory.known_vectors.copy()

            def one_client(cid: int) -> ClientReport:
                return run_client_round(
                    contexts[cid],
                    global_params,
                    prototypes,
                    class_to_row,
                    known_rows,
                    known_ids,
                    settings,
                    epochs=config.epochs,
                    lr=config.lr,
                    weight_decay=config.weight_decay,
                    tau_base=config.tau_base,
                    tau_density=config.tau_density,
                    k_max=config.k_max,
                    rng=rng_for(config.seed, "client", t, cid),
                )

            if config.workers > 1:
                with ThreadPoolExecutor(max_workers=config.workers) as pool:
                    reports = list(pool.map(one_client, participants))
            else:
                reports = [one_client(cid) for cid in participants]
            reports.sort(key=lambda r: r.client_id)

            global_params = aggregate_weights(reports)
            aggregate_prototypes(memory, reports, config.eps)
            pool_now = build_discovery_pool(reports)
            discover_categories(
                memory,
                pool_now,
                penalty_weight=config.lambda_hc,
                tau_base=config.tau_base,
                rho=config.rho,
                same_client_cannot_link=config.cannot_link,
            )

            if round_callback is not None:
                round_callback(t, memory, reports)

            test_z, test_y = _global_test_pool(contexts, partition, graph, global_params, config.eps)
            slots = predict(test_z, memory.prototype_matrix())
            old_acc, new_acc, all_acc, hr = evaluate_split(
                slots,
                test_y,
                masks.known_classes,
                masks.novel_classes,
                memory.num_slots,
                graph.num_classes,
            )
            report = MetricsReport(
                round=t,
                old_acc=old_acc,
                new_acc=new_acc,
                all_acc=all_acc,
                hrscore=hr,
                num_prototypes=memory.num_slots,
                seconds=time.perf_counter() - start,
            )
            metrics_rows.append(report)
            mf.write(report.csv_row() + "\n")
            for r in reports:
                lf.write(
                    f"{t},{r.client_id},{r.loss_sup:.6f},{r.loss_unsup:.6f},{r.loss_gcl:.6f}\n"
                )
            log.info(
                "round %d: old=%s new=%s all=%s hr=%s prototypes=%d (%.2fs)",
                t,
                _fmt(old_acc),
                _fmt(new_acc),
                _fmt(all_acc),
                _fmt(hr),
                memory.num_slots,
                report.seconds,
            )

    final = metrics_rows[-1]
    summary = {
        "config": config.as_dict(),
        "final": {
            "round": final.round,
            "old_acc": final.old_acc,
            "new_acc": final.new_acc,
            "all_acc": final.all_acc,
            "hrscore": final.hrscore,
            "num_prototypes": final.num_prototypes,
        },
        "num_known_slots": len(memory.known_class_ids),
        "num_novel_slots": len(memory.novel),
        "stale_slot_ids": memory.stale_slot_ids(),
        "known_classes": list(masks.known_classes),
        "novel_classes": list(masks.novel_classes),
    }
    (out_dir / "report.json").write_text(json.dumps(summary, indent=2) + "\n")
    memory.save(out_dir / "memory.json")
    (out_dir / "config.echo").write_text(config.echo())
    return summary


def _sample_participants(config: ExperimentConfig, round_index: int) -> list[int]:
    n = config.clients
    if config.client_fraction >= 1.0:
        return list(range(n))
    k = max(1, int(np.ceil(config.client_fraction * n)))
    rng = rng_for(config.seed, "participation", round_index)
    return sorted(int(c) for c in rng.choice(n, size=k, replace=False))


def _fmt(x: float | None) -> str:
    return "-" if x is None else f"{x:.2f}"


def run_sweep(
    base: ExperimentConfig, param: str, values: list[str], repeats: int, out_root: str | Path
) -> list[dict]:
    """Re-run the experiment per parameter value (and per repeat seed),
    emitting one metrics file each plus a summary table."""
    out_root = Path(out_root)
    out_root.mkdir(parents=True, exist_ok=True)
    rows = []
    for value in values:
        finals = []
        for rep in range(repeats):
            cfg = base.with_overrides(
                {param: value, "seed": base.seed + rep, "out_dir": str(out_root / f"{param}={value}" / f"seed{base.seed + rep}")}
            )
            summary = run_experiment(cfg)
            finals.append(summary["final"])
        hr = [f["hrscore"] for f in finals if f["hrscore"] is not None]
        allv = [f["all_acc"] for f in finals if f["all_acc"] is not None]
        rows.append(
            {
                "param": param,
                "value": value,
                "repeats": repeats,
                "hrscore_mean": float(np.mean(hr)) if hr else None,
                "hrscore_std": float(np.std(hr)) if hr else None,
                "all_acc_mean": float(np.mean(allv)) if allv else None,
                "all_acc_std": float(np.std(allv)) if allv else None,
            }
        )
    with open(out_root / "summary.csv", "w") as fh:
        fh.write("param,value,repeats,hrscore_mean,hrscore_std,all_acc_mean,all_acc_std\n")
        for r in rows:
            fh.write(
                f"{r['param']},{r['value']},{r['repeats']},"
                f"{_num(r['hrscore_mean'])},{_num(r['hrscore_std'])},"
                f"{_num(r['all_acc_mean'])},{_num(r['all_acc_std'])}\n"
            )
    return rows


def _num(x: float | None) -> str:
    return "" if x is None else f"{x:.4f}"
