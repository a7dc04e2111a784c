#pragma once

#include <vector>

#include "simfuse/labels.hpp"
#include "simfuse/similarity.hpp"

namespace simfuse {

/// Undirected graph; statistics and clustering use the unweighted skeleton,
/// weights are kept for inspection/export only.
struct Graph {
    struct Edge {
        int u, v;
        double w;
    };

    int n_nodes = 0;
    std::vector<Edge> edges;            // u < v, sorted, no duplicates
    std::vector<std::vector<int>> adj;  // sorted neighbor lists

    int n_edges() const { return static_cast<int>(edges.size()); }
    int degree(int v) const { return static_cast<int>(adj[v].size()); }
    bool has_edge(int u, int v) const;

    static Graph from_edges(int n, std::vector<Edge> edges);
};

/// A statistic that can be undefined (degenerate input).
struct Flagged {
    double value = 0.0;
    bool defined = false;
};

/// Union-of-directions KNN graph: each node contributes edges to its k
/// closest entries per the matrix orientation; ties broken by ascending
/// index. Edge weight is the fused affinity (floored at 1e-12) or 1 for
/// distance matrices.
Graph knn_graph(const SimilarityMatrix& P, int k);

double modularity(const Graph& g, const Labels& labels, double gamma = 1.0);

/// Triad participation ratio: per cluster, the fraction of its nodes in at
/// least one within-cluster triangle; unweighted mean over clusters.
double tpr(const Graph& g, const Labels& labels);

/// Degree assortativity: Pearson correlation over symmetrized edge-endpoint
/// degree pairs; undefined for regular graphs.
Flagged assortativity(const Graph& g);

/// Mean unweighted shortest-path length over reachable ordered pairs;
/// disconnected pairs excluded.
Flagged mean_path_length(const Graph& g);

struct DegreeStats {
    double mean = 0.0;
    double median = 0.0;
};
DegreeStats degree_stats(const Graph& g);

struct GraphStats {
    int n_nodes = 0;
    int n_edges = 0;
    int min_degree = 0;
    double mean_degree = 0.0;
    double median_degree = 0.0;
    double modularity_truth = 0.0;
    double tpr_truth = 0.0;
    Flagged assortativity;
    Flagged mean_path_length;
};
GraphStats compute_stats(const Graph& g, const Labels& truth, double gamma = 1.0);

}  // namespace simfuse
