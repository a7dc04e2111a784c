"""End-to-end smoke checks for the python bindings."""

import math

import simfuse


def test_problem_names():
    names = simfuse.problem_names()
    assert len(names) == 15
    assert "Easy" in names
    assert "Noisy 1Rand" in names


def test_generate_and_shapes():
    ds = simfuse.build_problem("Easy", n=60, seed=7, n_clusters=4, n_features=6)
    assert ds.n == 60
    assert ds.n_modalities == 3
    assert len(ds.truth) == 60
    assert ds.n_clusters == 4
    assert ds.features(0).shape == (60, 6)
    assert all(ds.present(1))
    assert ds.partial_mask is None


def test_generation_is_deterministic():
    a = simfuse.build_problem("Mixed All", n=40, seed=11, n_clusters=8, n_features=5)
    b = simfuse.build_problem("Mixed All", n=40, seed=11, n_clusters=8, n_features=5)
    assert a.truth == b.truth
    assert (a.features(2) == b.features(2)).all()


def test_fuse_cluster_score_pipeline():
    ds = simfuse.build_problem("Easy", n=90, seed=3, n_clusters=3, n_features=8, center_scale=1.0)
    for method in ("concat", "mean", "extreme", "snf", "nemo"):
        fused = simfuse.fuse(ds, method, k=10)
        assert fused.values.shape == (90, 90)
        g = simfuse.knn_graph(fused, 10)
        assert g.n_nodes == 90
        labels = simfuse.leiden(g, gamma=1.0, seed=1)
        assert len(labels) == 90
        score = simfuse.ami(labels, ds.truth)
        assert -1.0 <= score <= 1.0
    fused = simfuse.fuse(ds, "mean", k=10)
    g = simfuse.knn_graph(fused, 10)
    assert simfuse.ami(simfuse.leiden(g, 1.0, 1), ds.truth) > 0.5


def test_partial_mask_and_policies():
    ds = simfuse.build_problem("Easy", n=50, seed=5, n_clusters=3, n_features=6)
    masked = simfuse.mask_random(ds, 0.3, seed=9)
    assert masked.partial_mask is not None
    assert sum(1 for p in masked.present(0) if not p) + sum(
        1 for p in masked.present(1) if not p
    ) + sum(1 for p in masked.present(2) if not p) == 15
    policies = simfuse.partial_policies("mean")
    assert "impute_max" in policies and "ignore_nan" in policies
    fused = simfuse.fuse(masked, "mean", policy="ignore_nan", k=8)
    assert not math.isnan(fused.values.sum())


def test_metrics_match_known_values():
    assert simfuse.ami([0, 0, 1, 1], [1, 1, 0, 0]) == 1.0
    assert simfuse.ari([0, 0, 1, 1], [0, 0, 1, 1]) == 1.0
    assert abs(simfuse.ami([0, 1, 0, 1], [0, 0, 1, 1])) < 1e-9 or simfuse.ami(
        [0, 1, 0, 1], [0, 0, 1, 1]
    ) <= 0.0


def test_spectral_and_stats():
    ds = simfuse.build_problem("Easy", n=60, seed=2, n_clusters=3, n_features=6)
    fused = simfuse.fuse(ds, "snf", k=8)
    g = simfuse.knn_graph(fused, 8)
    labels = simfuse.spectral(g, 3, seed=4)
    assert len(set(labels)) <= 3
    stats = simfuse.graph_stats(g, ds.truth)
    assert stats["n_nodes"] == 60
    assert stats["min_degree"] >= 8
    assert 0.0 <= stats["tpr_truth"] <= 1.0


def test_dataset_roundtrip(tmp_path):
    ds = simfuse.build_problem("Noisy", n=30, seed=1, n_clusters=3, n_features=4)
    simfuse.save_dataset(ds, str(tmp_path / "ds"))
    back = simfuse.load_dataset(str(tmp_path / "ds"))
    assert back.truth == ds.truth
    assert (back.features(0) == ds.features(0)).all()


def test_run_experiment(tmp_path):
    out = tmp_path / "records.csv"
    cfg = (
        '{"problems": ["Easy"], "n_entities": 60, "n_clusters": 3, "n_features": 6,'
        ' "n_instances": 1, "methods": ["mean"], "clusterers": ["leiden"],'
        ' "k_neighbors": 8, "output": "%s"}' % out
    )
    count = simfuse.run_experiment(cfg)
    assert count == 1
    assert out.exists()
