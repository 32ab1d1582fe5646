#!/usr/bin/env python3
"""Regenerate the checked-in synthetic dataset at data/synthetic-sbm.

The output is deterministic, so re-running never changes the repository.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from fggcd.data import save_graph
from fggcd.synthetic import make_sbm_graph


def main() -> None:
    out = Path(__file__).resolve().parents[1] / "data" / "synthetic-sbm"
    graph = make_sbm_graph(
        name="synthetic-sbm",
        block_sizes=(50,) * 6,
        p_in=0.2,
        p_out=0.01,
        feature_dim=16,
        noise=0.6,
        seed=0,
    )
    save_graph(graph, out)
    print(f"wrote {graph.num_nodes} nodes / {graph.num_edges} edges to {out}")


if __name__ == "__main__":
    main()
