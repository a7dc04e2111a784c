#include "simfuse/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace simfuse {

bool Graph::has_edge(int u, int v) const {
    return std::binary_search(adj[u].begin(), adj[u].end(), v);
}

Graph Graph::from_edges(int n, std::vector<Edge> edges) {
    Graph g;
    g.n_nodes = n;
    for (Edge& e : edges) {
        if (e.u == e.v) throw std::invalid_argument("Graph: self-loop");
        if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n)
            throw std::invalid_argument("Graph: node out of range");
        if (e.w <= 0.0) throw std::invalid_argument("Graph: weights must be positive");
        if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (edges[i].u == edges[i - 1].u && edges[i].v == edges[i - 1].v)
            throw std::invalid_argument("Graph: duplicate edge");
    g.edges = std::move(edges);
    g.adj.assign(n, {});
    for (const Edge& e : g.edges) {
        g.adj[e.u].push_back(e.v);
        g.adj[e.v].push_back(e.u);
    }
    for (std::vector<int>& nb : g.adj) std::sort(nb.begin(), nb.end());
    return g;
}

Graph knn_graph(const SimilarityMatrix& P, int k) {
    const int n = P.n();
    if (n <= k) throw std::invalid_argument("knn_graph: n must exceed k");
    if (k <= 0) throw std::invalid_argument("knn_graph: k must be positive");
    if (!P.all_defined())
        throw std::invalid_argument("knn_graph: fused matrix has undefined entries");

    const bool ascending = P.orientation == Orientation::Distance;
    std::vector<std::pair<int, int>> selected;
    selected.reserve(static_cast<std::size_t>(n) * k);
    std::vector<std::pair<double, int>> cand;
    for (int i = 0; i < n; ++i) {
        cand.clear();
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double v = P.values(i, j);
            cand.emplace_back(ascending ? v : -v, j);
        }
        std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
        for (int t = 0; t < k; ++t) {
            const int j = cand[t].second;
            selected.emplace_back(std::min(i, j), std::max(i, j));
        }
    }
    std::sort(selected.begin(), selected.end());
    selected.erase(std::unique(selected.begin(), selected.end()), selected.end());

    std::vector<Graph::Edge> edges;
    edges.reserve(selected.size());
    for (const auto& [u, v] : selected) {
        const double w =
            ascending ? 1.0 : std::max(P.values(u, v), 1e-12);
        edges.push_back({u, v, w});
    }
    return Graph::from_edges(n, std::move(edges));
}

double modularity(const Graph& g, const Labels& labels, double gamma) {
    if (labels.n() != g.n_nodes) throw std::invalid_argument("modularity: label/graph size mismatch");
    const double m = g.n_edges();
    if (m == 0.0) return 0.0;

    std::vector<double> within(labels.n_clusters, 0.0);   // edges inside each cluster
    std::vector<double> deg_sum(labels.n_clusters, 0.0);  // total degree per cluster
    for (const Graph::Edge& e : g.edges) {
        if (labels.assignments[e.u] == labels.assignments[e.v]) within[labels.assignments[e.u]] += 1.0;
    }
    for (int v = 0; v < g.n_nodes; ++v) deg_sum[labels.assignments[v]] += g.degree(v);

    double q = 0.0;
    for (int c = 0; c < labels.n_clusters; ++c)
        q += within[c] / m - gamma * (deg_sum[c] / (2.0 * m)) * (deg_sum[c] / (2.0 * m));
    return q;
}

double tpr(const Graph& g, const Labels& labels) {
    if (labels.n() != g.n_nodes) throw std::invalid_argument("tpr: label/graph size mismatch");
    std::vector<std::uint8_t> in_triad(g.n_nodes, 0);
    for (int u = 0; u < g.n_nodes; ++u) {
        if (in_triad[u]) continue;
        const int c = labels.assignments[u];
        std::vector<int> same;
        for (int v : g.adj[u])
            if (labels.assignments[v] == c) same.push_back(v);
        bool found = false;
        for (std::size_t a = 0; a < same.size() && !found; ++a)
            for (std::size_t b = a + 1; b < same.size() && !found; ++b)
                if (g.has_edge(same[a], same[b])) {
                    in_triad[u] = in_triad[same[a]] = in_triad[same[b]] = 1;
                    found = true;
                }
    }

    std::vector<int> cluster_size(labels.n_clusters, 0);
    std::vector<int> cluster_hits(labels.n_clusters, 0);
    for (int v = 0; v < g.n_nodes; ++v) {
        ++cluster_size[labels.assignments[v]];
        if (in_triad[v]) ++cluster_hits[labels.assignments[v]];
    }
    double total = 0.0;
    for (int c = 0; c < labels.n_clusters; ++c)
        total += static_cast<double>(cluster_hits[c]) / cluster_size[c];
    return total / labels.n_clusters;
}

Flagged assortativity(const Graph& g) {
    if (g.edges.empty()) return {};
    // Symmetrized endpoint degree pairs: each edge contributes (ku,kv) and (kv,ku).
    double sum_x = 0.0, sum_xx = 0.0, sum_xy = 0.0;
    const double cnt = 2.0 * g.n_edges();
    for (const Graph::Edge& e : g.edges) {
        const double ku = g.degree(e.u), kv = g.degree(e.v);
        sum_x += ku + kv;
        sum_xx += ku * ku + kv * kv;
        sum_xy += 2.0 * ku * kv;
    }
    const double mean = sum_x / cnt;
    const double var = sum_xx / cnt - mean * mean;
    const double cov = sum_xy / cnt - mean * mean;
    if (var <= 1e-15) return {};
    return {cov / var, true};
}

Flagged mean_path_length(const Graph& g) {
    if (g.n_nodes < 2) return {};
    double total = 0.0;
    long long pairs = 0;
    std::vector<int> dist(g.n_nodes);
    std::deque<int> queue;
    for (int s = 0; s < g.n_nodes; ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        dist[s] = 0;
        queue.clear();
        queue.push_back(s);
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            for (int v : g.adj[u]) {
                if (dist[v] >= 0) continue;
                dist[v] = dist[u] + 1;
                total += dist[v];
                ++pairs;
                queue.push_back(v);
            }
        }
    }
    if (pairs == 0) return {};
    return {total / pairs, true};
}

DegreeStats degree_stats(const Graph& g) {
    if (g.n_nodes == 0) return {};
    std::vector<int> degs(g.n_nodes);
    for (int v = 0; v < g.n_nodes; ++v) degs[v] = g.degree(v);
    std::sort(degs.begin(), degs.end());
    DegreeStats s;
    s.mean = 2.0 * g.n_edges() / g.n_nodes;
    const int n = g.n_nodes;
    s.median = n % 2 == 1 ? degs[n / 2] : 0.5 * (degs[n / 2 - 1] + degs[n / 2]);
    return s;
}

GraphStats compute_stats(const Graph& g, const Labels& truth, double gamma) {
    GraphStats s;
    s.n_nodes = g.n_nodes;
    s.n_edges = g.n_edges();
    int min_deg = g.n_nodes > 0 ? g.degree(0) : 0;
    for (int v = 1; v < g.n_nodes; ++v) min_deg = std::min(min_deg, g.degree(v));
    s.min_degree = min_deg;
    const DegreeStats d = degree_stats(g);
    s.mean_degree = d.mean;
    s.median_degree = d.median;
    s.modularity_truth = modularity(g, truth, gamma);
    s.tpr_truth = tpr(g, truth);
    s.assortativity = assortativity(g);
    s.mean_path_length = mean_path_length(g);
    return s;
}

}  // namespace simfuse
