from pathlib import Path

import numpy as np
import pytest

from fggcd.data import (
    ROLE_LABELED,
    ROLE_UNLABELED,
    ROLE_VAL,
    DatasetError,
    gcd_split,
    load_graph,
    make_graph,
    save_graph,
    sparsify_labels,
    validate_dataset,
)
from fggcd.synthetic import make_sbm_graph


# ------------------------------------------------------------------ disk I/O


def test_save_load_roundtrip(tmp_path):
    graph = make_sbm_graph(block_sizes=(8, 8, 8), feature_dim=5, seed=3)
    save_graph(graph, tmp_path / "ds")
    loaded = load_graph(tmp_path / "ds")
    assert loaded.num_nodes == graph.num_nodes
    assert loaded.num_classes == graph.num_classes
    assert np.array_equal(loaded.edges, graph.edges)
    assert np.array_equal(loaded.labels, graph.labels)
    # features pass through an f32 round trip
    assert np.abs(loaded.features - graph.features).max() < 1e-6


def test_directed_duplicates_collapse_to_one_edge(tmp_path):
    d = tmp_path / "ds"
    graph = make_graph("pair", np.zeros((2, 3)), np.array([[0, 1]]), [0, 0], 1)
    save_graph(graph, d)
    (d / "edges.csv").write_text("src,dst\n0,1\n1,0\n")
    loaded = load_graph(d)
    assert loaded.num_edges == 1


def test_bad_magic_rejected(tmp_path):
    d = tmp_path / "ds"
    save_graph(make_sbm_graph(block_sizes=(4, 4), feature_dim=3, seed=0), d)
    raw = bytearray((d / "features.bin").read_bytes())
    raw[:8] = b"NOTMAGIC"
    (d / "features.bin").write_bytes(bytes(raw))
    with pytest.raises(DatasetError, match="magic"):
        load_graph(d)


def test_truncated_features_rejected(tmp_path):
    d = tmp_path / "ds"
    save_graph(make_sbm_graph(block_sizes=(4, 4), feature_dim=3, seed=0), d)
    raw = (d / "features.bin").read_bytes()
    (d / "features.bin").write_bytes(raw[:-8])
    with pytest.raises(DatasetError, match="bytes"):
        load_graph(d)


def test_label_out_of_range_rejected(tmp_path):
    d = tmp_path / "ds"
    graph = make_sbm_graph(block_sizes=(4, 4), feature_dim=3, seed=0)
    save_graph(graph, d)
    text = (d / "labels.csv").read_text().splitlines()
    text[1] = "0,99"
    (d / "labels.csv").write_text("\n".join(text) + "\n")
    with pytest.raises(DatasetError, match="label"):
        load_graph(d)


def test_edge_endpoint_out_of_range_rejected(tmp_path):
    d = tmp_path / "ds"
    save_graph(make_sbm_graph(block_sizes=(4, 4), feature_dim=3, seed=0), d)
    with open(d / "edges.csv", "a") as fh:
        fh.write("0,64\n")
    with pytest.raises(DatasetError, match="endpoint"):
        load_graph(d)


def test_validate_dataset_passes_on_fresh_export(tmp_path):
    d = tmp_path / "ds"
    graph = make_sbm_graph(block_sizes=(6, 6), feature_dim=4, seed=1)
    save_graph(graph, d)
    info = validate_dataset(d)
    assert info["num_nodes"] == graph.num_nodes
    assert info["num_edges"] == graph.num_edges


def test_self_loops_dropped():
    graph = make_graph("loops", np.zeros((3, 2)), np.array([[0, 0], [0, 1]]), [0, 0, 0], 1)
    assert graph.num_edges == 1


CORA = Path(__file__).resolve().parents[1] / "data" / "cora"


@pytest.mark.skipif(not (CORA / "meta.json").exists(), reason="exported Cora not present")
def test_cora_export_statistics():
    graph = load_graph(CORA)
    assert graph.num_nodes == 2708
    assert graph.num_features == 1433
    assert graph.num_classes == 7
    assert graph.num_edges == 5429


# -------------------------------------------------------------------- splits


def _split_counts(num_classes):
    known = -(-num_classes // 2)
    return known, num_classes - known


def test_known_novel_counts_seven_classes(single_client_partition):
    graph = make_sbm_graph(block_sizes=(10,) * 7, feature_dim=4, seed=0)
    masks = gcd_split(graph, single_client_partition(graph), 0.2, seed=1)
    assert len(masks.known_classes) == 4 and len(masks.novel_classes) == 3


def test_known_novel_counts_fifteen_classes(single_client_partition):
    graph = make_sbm_graph(block_sizes=(6,) * 15, feature_dim=4, seed=0)
    masks = gcd_split(graph, single_client_partition(graph), 0.2, seed=1)
    assert len(masks.known_classes) == 8 and len(masks.novel_classes) == 7


def test_split_fractions_exact_for_ten_nodes(single_client_partition):
    graph = make_sbm_graph(block_sizes=(10, 10), feature_dim=4, p_in=0.5, seed=2)
    masks = gcd_split(graph, single_client_partition(graph), 0.2, seed=5)
    (known_cls,) = [c for c in masks.known_classes]
    members = np.flatnonzero(graph.labels == known_cls)
    roles = masks.roles[members]
    assert (roles == ROLE_LABELED).sum() == 2
    assert (roles == ROLE_VAL).sum() == 4
    assert (roles == ROLE_UNLABELED).sum() == 4


def test_novel_nodes_all_unlabeled(single_client_partition):
    graph = make_sbm_graph(block_sizes=(12,) * 5, feature_dim=4, seed=3)
    masks = gcd_split(graph, single_client_partition(graph), 0.2, seed=9)
    for cls in masks.novel_classes:
        assert np.all(masks.roles[graph.labels == cls] == ROLE_UNLABELED)


def test_labeled_and_val_only_on_known_classes(single_client_partition):
    graph = make_sbm_graph(block_sizes=(9,) * 4, feature_dim=4, seed=4)
    masks = gcd_split(graph, single_client_partition(graph), 0.2, seed=2)
    special = masks.roles != ROLE_UNLABELED
    assert set(np.unique(graph.labels[special])) <= set(masks.known_classes)


def test_split_fraction_deviation_at_most_one_node(single_client_partition):
    graph = make_sbm_graph(block_sizes=(13, 17, 29, 8), feature_dim=4, seed=5)
    masks = gcd_split(graph, single_client_partition(graph), 0.2, seed=3)
    for cls in masks.known_classes:
        members = np.flatnonzero(graph.labels == cls)
        n_c = members.size
        n_lab = (masks.roles[members] == ROLE_LABELED).sum()
        n_val = (masks.roles[members] == ROLE_VAL).sum()
        assert abs(n_lab - 0.2 * n_c) <= 1.0
        assert abs(n_val - 0.4 * n_c) <= 1.0


def test_tiny_class_still_gets_one_label(single_client_partition):
    # 2 members of the known class: rounding alone would label zero of them.
    graph = make_graph(
        "tiny", np.zeros((6, 2)), np.empty((0, 2)), [0, 0, 1, 1, 1, 1], num_classes=2
    )
    for seed in range(6):
        masks = gcd_split(graph, single_client_partition(graph), 0.2, seed=seed)
        for cls in masks.known_classes:
            members = np.flatnonzero(graph.labels == cls)
            assert (masks.roles[members] == ROLE_LABELED).sum() >= 1


def test_split_deterministic(single_client_partition):
    graph = make_sbm_graph(block_sizes=(11,) * 6, feature_dim=4, seed=6)
    part = single_client_partition(graph)
    a = gcd_split(graph, part, 0.2, seed=42)
    b = gcd_split(graph, part, 0.2, seed=42)
    assert a.known_classes == b.known_classes
    assert np.array_equal(a.roles, b.roles)


def test_split_rejects_bad_rate(single_client_partition):
    graph = make_sbm_graph(block_sizes=(5, 5), feature_dim=3, seed=0)
    with pytest.raises(ValueError):
        gcd_split(graph, single_client_partition(graph), 0.0, seed=0)


# ------------------------------------------------------------------ sparsify


def test_sparsify_rate_zero_is_identity(single_client_partition):
    graph = make_sbm_graph(block_sizes=(10,) * 4, feature_dim=4, seed=7)
    part = single_client_partition(graph)
    masks = gcd_split(graph, part, 0.2, seed=0)
    assert sparsify_labels(masks, part, 0.0, seed=1) is masks


def test_sparsify_removes_expected_count(single_client_partition):
    graph = make_sbm_graph(block_sizes=(50, 50), feature_dim=4, p_in=0.3, seed=8)
    part = single_client_partition(graph)
    masks = gcd_split(graph, part, 0.2, seed=0)
    before = (masks.roles == ROLE_LABELED).sum()
    assert before == 10  # 50 known-class nodes at 20%
    after = sparsify_labels(masks, part, 0.1, seed=1)
    assert (after.roles == ROLE_LABELED).sum() == 9


def test_sparsify_deterministic(single_client_partition):
    graph = make_sbm_graph(block_sizes=(30, 30, 30), feature_dim=4, seed=9)
    part = single_client_partition(graph)
    masks = gcd_split(graph, part, 0.2, seed=0)
    a = sparsify_labels(masks, part, 0.5, seed=77)
    b = sparsify_labels(masks, part, 0.5, seed=77)
    assert np.array_equal(a.roles, b.roles)
