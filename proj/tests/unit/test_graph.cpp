#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "simfuse/graph.hpp"
#include "simfuse/labels.hpp"
#include "simfuse/rng.hpp"
#include "simfuse/similarity.hpp"

using namespace simfuse;

namespace {

SimilarityMatrix distance_matrix(int n, const std::vector<std::vector<double>>& d) {
    SimilarityMatrix S = SimilarityMatrix::zeros(n, Orientation::Distance);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) S.values(i, j) = d[i][j];
    return S;
}

Graph path_graph(int n) {
    std::vector<Graph::Edge> e;
    for (int i = 0; i + 1 < n; ++i) e.push_back({i, i + 1, 1.0});
    return Graph::from_edges(n, e);
}

Graph complete_graph(int n) {
    std::vector<Graph::Edge> e;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) e.push_back({i, j, 1.0});
    return Graph::from_edges(n, e);
}

Graph two_triangles() {
    return Graph::from_edges(6, {{0, 1, 1}, {0, 2, 1}, {1, 2, 1}, {3, 4, 1}, {3, 5, 1}, {4, 5, 1}});
}

Graph random_graph(int n, double p, Rng& rng) {
    std::vector<Graph::Edge> e;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.uniform() < p) e.push_back({i, j, 1.0});
    return Graph::from_edges(n, e);
}

// Q from the definition: sum over clusters of L_c/m - gamma*(D_c/2m)^2.
double modularity_oracle(const Graph& g, const Labels& y, double gamma) {
    const double m = g.n_edges();
    if (m == 0) return 0.0;
    std::vector<double> within(y.n_clusters, 0.0), degsum(y.n_clusters, 0.0);
    for (const Graph::Edge& e : g.edges)
        if (y.assignments[e.u] == y.assignments[e.v]) within[y.assignments[e.u]] += 1.0;
    for (int v = 0; v < g.n_nodes; ++v) degsum[y.assignments[v]] += g.degree(v);
    double q = 0.0;
    for (int c = 0; c < y.n_clusters; ++c)
        q += within[c] / m - gamma * (degsum[c] / (2.0 * m)) * (degsum[c] / (2.0 * m));
    return q;
}

// Per cluster: fraction of nodes in a within-cluster triangle, brute force.
double tpr_oracle(const Graph& g, const Labels& y) {
    double total = 0.0;
    for (int c = 0; c < y.n_clusters; ++c) {
        std::vector<int> members;
        for (int v = 0; v < g.n_nodes; ++v)
            if (y.assignments[v] == c) members.push_back(v);
        if (members.empty()) continue;
        int in_triad = 0;
        for (int v : members) {
            bool found = false;
            for (int a : members)
                for (int b : members) {
                    if (a >= b || a == v || b == v) continue;
                    if (g.has_edge(v, a) && g.has_edge(v, b) && g.has_edge(a, b)) found = true;
                }
            in_triad += found;
        }
        total += static_cast<double>(in_triad) / members.size();
    }
    return total / y.n_clusters;
}

}  // namespace

TEST_SUITE("graph") {
    TEST_CASE("knn union on the 3-node hand instance") {
        // d(0,1)=1 < d(0,2)=2 < d(1,2)=3, k=1: 0->1, 1->0, 2->0.
        const SimilarityMatrix D = distance_matrix(3, {{0, 1, 2}, {1, 0, 3}, {2, 3, 0}});
        const Graph g = knn_graph(D, 1);
        CHECK(g.n_edges() == 2);
        CHECK(g.has_edge(0, 1));
        CHECK(g.has_edge(0, 2));
        CHECK(!g.has_edge(1, 2));
    }

    TEST_CASE("knn with k = n-1 gives the complete graph") {
        Rng rng(5);
        const int n = 9;
        SimilarityMatrix D = SimilarityMatrix::zeros(n, Orientation::Distance);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double v = rng.uniform() + 0.1;
                D.values(i, j) = D.values(j, i) = v;
            }
        const Graph g = knn_graph(D, n - 1);
        CHECK(g.n_edges() == n * (n - 1) / 2);
    }

    TEST_CASE("knn degrees are bounded by k and 2k on random inputs") {
        Rng rng(6);
        const int n = 40, k = 5;
        SimilarityMatrix D = SimilarityMatrix::zeros(n, Orientation::Distance);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double v = rng.uniform() + 0.01;
                D.values(i, j) = D.values(j, i) = v;
            }
        const Graph g = knn_graph(D, k);
        int degsum = 0;
        for (int v = 0; v < n; ++v) {
            CHECK(g.degree(v) >= k);
            degsum += g.degree(v);
        }
        const double mean_deg = static_cast<double>(degsum) / n;
        CHECK(mean_deg >= k);
        CHECK(mean_deg <= 2.0 * k);
    }

    TEST_CASE("knn respects orientation") {
        // Affinity: larger is closer. Node 0's best is 2 (0.9), not 1 (0.1).
        SimilarityMatrix A = SimilarityMatrix::zeros(3, Orientation::Affinity);
        A.values << 1, 0.1, 0.9, 0.1, 1, 0.5, 0.9, 0.5, 1;
        const Graph g = knn_graph(A, 1);
        CHECK(g.has_edge(0, 2));
        CHECK(!g.has_edge(0, 1));
        // Weights carry the affinity on affinity graphs.
        for (const Graph::Edge& e : g.edges)
            if (e.u == 0 && e.v == 2) CHECK(e.w == doctest::Approx(0.9));

        const SimilarityMatrix D = distance_matrix(3, {{0, 1, 2}, {1, 0, 3}, {2, 3, 0}});
        for (const Graph::Edge& e : knn_graph(D, 1).edges) CHECK(e.w == 1.0);
    }

    TEST_CASE("knn rejects undefined entries and bad k") {
        SimilarityMatrix D = SimilarityMatrix::zeros(4, Orientation::Distance);
        D.present = {1, 1, 0, 1};
        CHECK_THROWS_AS(knn_graph(D, 1), std::invalid_argument);
        const SimilarityMatrix ok = distance_matrix(3, {{0, 1, 2}, {1, 0, 3}, {2, 3, 0}});
        CHECK_THROWS_AS(knn_graph(ok, 3), std::invalid_argument);
        CHECK_THROWS_AS(knn_graph(ok, 0), std::invalid_argument);
    }

    TEST_CASE("from_edges validates and normalizes") {
        CHECK_THROWS_AS(Graph::from_edges(3, {{0, 0, 1.0}}), std::invalid_argument);
        CHECK_THROWS_AS(Graph::from_edges(3, {{0, 3, 1.0}}), std::invalid_argument);
        CHECK_THROWS_AS(Graph::from_edges(3, {{0, 1, 1.0}, {1, 0, 1.0}}), std::invalid_argument);
        CHECK_THROWS_AS(Graph::from_edges(3, {{0, 1, 0.0}}), std::invalid_argument);
        const Graph g = Graph::from_edges(3, {{2, 1, 1.0}, {1, 0, 1.0}});
        CHECK(g.n_edges() == 2);
        CHECK(g.edges[0].u == 0);
        CHECK(g.edges[0].v == 1);
        CHECK(g.edges[1].u == 1);
        CHECK(g.edges[1].v == 2);
        CHECK(g.adj[1] == std::vector<int>{0, 2});
    }

    TEST_CASE("modularity of two separated triangles is one half") {
        const Labels y = Labels::from_assignments({0, 0, 0, 1, 1, 1});
        CHECK(modularity(two_triangles(), y) == doctest::Approx(0.5).epsilon(1e-12));
    }

    TEST_CASE("modularity of one big cluster is zero") {
        const Labels y = Labels::from_assignments(std::vector<int>(6, 0));
        CHECK(modularity(two_triangles(), y) == doctest::Approx(0.0).epsilon(1e-12));
    }

    TEST_CASE("modularity matches the brute-force oracle with and without gamma") {
        Rng rng(9);
        for (int trial = 0; trial < 20; ++trial) {
            const Graph g = random_graph(25, 0.2, rng);
            if (g.n_edges() == 0) continue;
            const Labels y = random_labels(25, 4, 100 + trial);
            for (double gamma : {0.5, 1.0, 1.7}) {
                CHECK(modularity(g, y, gamma) ==
                      doctest::Approx(modularity_oracle(g, y, gamma)).epsilon(1e-12));
            }
        }
        const Graph empty = Graph::from_edges(4, {});
        CHECK(modularity(empty, random_labels(4, 2, 1)) == 0.0);
    }

    TEST_CASE("tpr hand cases") {
        // One triangle as one cluster.
        const Labels tri = Labels::from_assignments({0, 0, 0});
        CHECK(tpr(complete_graph(3), tri) == doctest::Approx(1.0));
        // 3-path as one cluster: no triangle.
        CHECK(tpr(path_graph(3), tri) == doctest::Approx(0.0));
        // Triangle cluster + 3-path cluster: (1 + 0) / 2.
        const Graph mixed = Graph::from_edges(
            6, {{0, 1, 1}, {0, 2, 1}, {1, 2, 1}, {3, 4, 1}, {4, 5, 1}});
        const Labels y = Labels::from_assignments({0, 0, 0, 1, 1, 1});
        CHECK(tpr(mixed, y) == doctest::Approx(0.5));
        // Singleton clusters contribute zero.
        const Labels singleton = Labels::from_assignments({0, 0, 0, 1});
        CHECK(tpr(complete_graph(4), singleton) == doctest::Approx(0.5));
    }

    TEST_CASE("tpr matches the brute-force oracle") {
        Rng rng(11);
        for (int trial = 0; trial < 15; ++trial) {
            const Graph g = random_graph(20, 0.25, rng);
            const Labels y = random_labels(20, 3, 200 + trial);
            CHECK(tpr(g, y) == doctest::Approx(tpr_oracle(g, y)).epsilon(1e-12));
        }
    }

    TEST_CASE("assortativity of a star is minus one, regular graphs undefined") {
        const Graph star = Graph::from_edges(4, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}});
        const Flagged a = assortativity(star);
        REQUIRE(a.defined);
        CHECK(a.value == doctest::Approx(-1.0).epsilon(1e-12));

        CHECK(!assortativity(complete_graph(5)).defined);
        const Graph pair_edges = Graph::from_edges(4, {{0, 1, 1}, {2, 3, 1}});
        CHECK(!assortativity(pair_edges).defined);
    }

    TEST_CASE("assortativity lies in [-1, 1] on random graphs") {
        Rng rng(13);
        for (int trial = 0; trial < 10; ++trial) {
            const Graph g = random_graph(30, 0.15, rng);
            const Flagged a = assortativity(g);
            if (!a.defined) continue;
            CHECK(a.value >= -1.0 - 1e-12);
            CHECK(a.value <= 1.0 + 1e-12);
        }
    }

    TEST_CASE("mean path length on hand instances") {
        CHECK(mean_path_length(complete_graph(3)).value == doctest::Approx(1.0));
        // Path 0-1-2: ordered pairs (1,1,2) twice -> 8/6 = 4/3.
        CHECK(mean_path_length(path_graph(3)).value == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
        // Disconnected pairs are excluded.
        const Graph pair_edges = Graph::from_edges(4, {{0, 1, 1}, {2, 3, 1}});
        const Flagged mpl = mean_path_length(pair_edges);
        REQUIRE(mpl.defined);
        CHECK(mpl.value == doctest::Approx(1.0));
        // No edges at all: undefined.
        CHECK(!mean_path_length(Graph::from_edges(3, {})).defined);
    }

    TEST_CASE("degree stats on a star") {
        const Graph star = Graph::from_edges(4, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}});
        const DegreeStats ds = degree_stats(star);
        CHECK(ds.mean == doctest::Approx(1.5));
        CHECK(ds.median == doctest::Approx(1.0));
    }

    TEST_CASE("compute_stats bundles the individual statistics") {
        const Graph g = two_triangles();
        const Labels y = Labels::from_assignments({0, 0, 0, 1, 1, 1});
        const GraphStats st = compute_stats(g, y);
        CHECK(st.n_nodes == 6);
        CHECK(st.n_edges == 6);
        CHECK(st.min_degree == 2);
        CHECK(st.mean_degree == doctest::Approx(2.0));
        CHECK(st.median_degree == doctest::Approx(2.0));
        CHECK(st.modularity_truth == doctest::Approx(0.5));
        CHECK(st.tpr_truth == doctest::Approx(1.0));
        CHECK(!st.assortativity.defined);  // 2-regular
        REQUIRE(st.mean_path_length.defined);
        CHECK(st.mean_path_length.value == doctest::Approx(1.0));
    }
}
