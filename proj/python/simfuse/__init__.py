"""Multi-modal similarity integration toolkit.

Thin wrapper over the C++ core: synthetic problem generation, five fusion
methods, KNN network construction, community detection, and scoring.
"""

from ._simfuse import (
    Dataset,
    FuseResult,
    Graph,
    SimilarityMatrix,
    ami,
    ari,
    build_problem,
    fuse,
    graph_stats,
    knn_graph,
    leiden,
    load_dataset,
    mask_cluster,
    mask_random,
    modularity,
    partial_policies,
    problem_names,
    run_experiment,
    save_dataset,
    select_resolution,
    spectral,
    tpr,
)

__all__ = [
    "Dataset",
    "FuseResult",
    "Graph",
    "SimilarityMatrix",
    "ami",
    "ari",
    "build_problem",
    "fuse",
    "graph_stats",
    "knn_graph",
    "leiden",
    "load_dataset",
    "mask_cluster",
    "mask_random",
    "modularity",
    "partial_policies",
    "problem_names",
    "run_experiment",
    "save_dataset",
    "select_resolution",
    "spectral",
    "tpr",
]
