"""Smoke test for the netcover Python extension.

Build and install first:
    pip install --no-build-isolation -e crates/python
then run:
    python crates/python/python/smoke_test.py
"""

import math
import tempfile
from pathlib import Path

import netcover


def check_graph():
    g = netcover.Graph(3, [(0, 1), (1, 2)])
    assert g.node_count == 3 and g.edge_count == 2
    assert g.neighbors(1) == [0, 2]
    assert netcover.Graph.from_edge_list(g.to_edge_list()).edges() == g.edges()
    try:
        netcover.Graph(2, [(0, 0)])
    except ValueError:
        pass
    else:
        raise AssertionError("self-loop accepted")


def check_generators():
    for model in ("ER", "BA", "WAX", "LFR"):
        g = netcover.generate(model, 400, 6, seed=3)
        assert abs(g.average_degree() - 6) / 6 < 0.1, (model, g.average_degree())
    assert netcover.generate("WAX", 200, 4, seed=1).coords() is not None
    assert len(set(netcover.generate("LFR", 200, 6, seed=1).communities())) == 5


def check_walks():
    g = netcover.Graph(4, [(0, 1), (0, 2), (0, 3)])
    p = netcover.transition_distribution(g, 0, "RW")
    assert all(abs(x - 1 / 3) < 1e-12 for x in p)
    tri = netcover.Graph(3, [(0, 1), (0, 2)])
    p = netcover.transition_distribution(tri, 0, "TSAW", edge_visits=[(0, 2, 1)])
    assert abs(p[0] - 2 / 3) < 1e-12 and abs(p[1] - 1 / 3) < 1e-12
    assert abs(netcover.DEFAULT_LAMBDA - math.log(2)) < 1e-15

    g = netcover.generate("ER", 200, 6, seed=5).giant_component()
    a = netcover.run_walk(g, "TSAW", 0, 500, seed=7)
    assert a == netcover.run_walk(g, "TSAW", 0, 500, seed=7)
    assert len(a) == 501
    curve = netcover.learning_curve(a, g.node_count)
    assert curve[0] == 1 / g.node_count and all(x <= y for x, y in zip(curve, curve[1:]))
    assert len(netcover.rate_features(curve, 100)) == 5


def check_oracle():
    path = netcover.Graph(2, [(0, 1)])
    assert netcover.oracle_expected_coverage(path, "RWD", 0, 3) == [0.5, 1.0, 1.0, 1.0]


def check_pca():
    fit = netcover.pca_fit([[float(i), 2.0 * i] for i in range(10)])
    assert abs(fit.explained_variance_ratio[0] - 1.0) < 1e-9
    pc1, pc2 = fit.project(fit.mean_vector)
    assert abs(pc1) < 1e-12 and abs(pc2) < 1e-12
    assert netcover.normalize_curve([0.0, 0.5]) == [0.0, 1.0]


def check_experiment():
    assert netcover.derive_seed(0, 0, 0, 0) != netcover.derive_seed(0, 0, 0, 1)
    with tempfile.TemporaryDirectory() as tmp:
        config = "models = ER, BA\nns = 100\nks = 4\nsteps = 200\nnetworks_per_config = 1\nwalks_per_network = 4\n"
        files = netcover.run_experiment(config, workers=2, out=tmp)
        names = {Path(f).name for f in files}
        assert {"curves.csv", "features.csv", "pca.csv", "manifest.txt"} <= names, names
        rows = (Path(tmp) / "features.csv").read_text().splitlines()
        assert len(rows) == 1 + 8


if __name__ == "__main__":
    for check in (check_graph, check_generators, check_walks, check_oracle, check_pca, check_experiment):
        check()
        print(f"ok  {check.__name__}")
    print("smoke test passed")
