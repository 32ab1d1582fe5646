import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


def pytest_runtest_logreport(report):
    """One visible pass/fail line per acceptance criterion."""
    if "test_acceptance" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.skipped):
        outcome = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
        name = report.nodeid.split("::")[-1].split("[")[0]
        print(f"\n[acceptance] {name}: {outcome}", flush=True)

from fggcd.data import Graph, make_graph
from fggcd.louvain import Partition


@pytest.fixture
def single_client_partition():
    """Wrap a whole graph as one client."""

    def build(graph: Graph) -> Partition:
        nodes = np.arange(graph.num_nodes)
        return Partition(
            assignment=np.zeros(graph.num_nodes, dtype=np.int64),
            client_nodes=(nodes,),
            client_edges=(graph.edges.copy(),),
        )

    return build


@pytest.fixture
def two_block_graph():
    """Two 5-node cliques joined by one bridge edge, labels = block id."""
    edges = []
    for base in (0, 5):
        for i in range(5):
            for j in range(i + 1, 5):
                edges.append((base + i, base + j))
    edges.append((0, 5))
    rng = np.random.default_rng(0)
    features = rng.normal(size=(10, 4))
    labels = np.array([0] * 5 + [1] * 5)
    return make_graph("two_block", features, np.array(edges), labels, num_classes=2)
