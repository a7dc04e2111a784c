#include "simfuse/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>

#include "simfuse/metrics.hpp"
#include "simfuse/rng.hpp"

namespace simfuse {

namespace {

constexpr double kGainEps = 1e-9;      // minimum gain for a local move
constexpr double kRefineTheta = 0.01;  // randomness temperature in refinement

// Weighted graph used internally; the input skeleton enters with unit
// weights, aggregation introduces real weights and self-loops. self_w follows
// the A_uu convention where an internal edge of weight w contributes 2w.
struct WGraph {
    int n = 0;
    std::vector<double> self_w;
    std::vector<std::vector<std::pair<int, double>>> adj;  // sorted, no self entries
    std::vector<double> strength;
    double big_m = 0.0;  // sum of strengths = 2 * total edge weight

    void finalize() {
        strength.assign(n, 0.0);
        for (int u = 0; u < n; ++u) {
            strength[u] = self_w[u];
            for (const auto& [v, w] : adj[u]) strength[u] += w;
        }
        big_m = 0.0;
        for (double s : strength) big_m += s;
    }
};

WGraph from_skeleton(const Graph& g) {
    WGraph wg;
    wg.n = g.n_nodes;
    wg.self_w.assign(wg.n, 0.0);
    wg.adj.assign(wg.n, {});
    for (const Graph::Edge& e : g.edges) {
        wg.adj[e.u].emplace_back(e.v, 1.0);
        wg.adj[e.v].emplace_back(e.u, 1.0);
    }
    for (auto& nb : wg.adj) std::sort(nb.begin(), nb.end());
    wg.finalize();
    return wg;
}

double wq(const WGraph& g, const std::vector<int>& comm, double gamma) {
    if (g.big_m <= 0.0) return 0.0;
    int max_id = 0;
    for (int c : comm) max_id = std::max(max_id, c);
    std::vector<double> within(max_id + 1, 0.0), totals(max_id + 1, 0.0);
    for (int u = 0; u < g.n; ++u) {
        within[comm[u]] += g.self_w[u];
        totals[comm[u]] += g.strength[u];
        for (const auto& [v, w] : g.adj[u])
            if (comm[v] == comm[u]) within[comm[u]] += w;  // both directions visited
    }
    double q = 0.0;
    for (std::size_t c = 0; c < within.size(); ++c) {
        const double frac = totals[c] / g.big_m;
        q += within[c] / g.big_m - gamma * frac * frac;
    }
    return q;
}

// Queue-based single-node moving. On return no single-node move improves the
// gain by more than kGainEps. Community ids live in [0, 2n).
bool local_move(const WGraph& g, std::vector<int>& comm, double gamma, Rng& rng) {
    const int n = g.n;
    if (n == 0 || g.big_m <= 0.0) return false;
    const int id_cap = 2 * n + 1;
    std::vector<double> totals(id_cap, 0.0);
    std::vector<int> counts(id_cap, 0);
    int max_used = 0;
    for (int u = 0; u < n; ++u) {
        totals[comm[u]] += g.strength[u];
        counts[comm[u]] += 1;
        max_used = std::max(max_used, comm[u]);
    }
    std::vector<int> free_ids;
    for (int c = id_cap - 1; c > max_used; --c) free_ids.push_back(c);
    for (int c = max_used; c >= 0; --c)
        if (counts[c] == 0) free_ids.push_back(c);

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    std::deque<int> queue(order.begin(), order.end());
    std::vector<std::uint8_t> in_queue(n, 1);

    std::vector<double> k_to(id_cap, 0.0);
    std::vector<int> touched;
    bool moved_any = false;

    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        in_queue[u] = 0;

        const int a = comm[u];
        totals[a] -= g.strength[u];
        counts[a] -= 1;

        touched.clear();
        for (const auto& [v, w] : g.adj[u]) {
            const int c = comm[v];
            if (v == u) continue;
            if (k_to[c] == 0.0 && c != a) touched.push_back(c);
            k_to[c] += w;
        }
        if (std::find(touched.begin(), touched.end(), a) == touched.end()) touched.push_back(a);
        std::sort(touched.begin(), touched.end());

        const double su = g.strength[u];
        const double stay_gain = k_to[a] - gamma * su * totals[a] / g.big_m;
        double best_gain = stay_gain;
        int best_c = a;
        for (int c : touched) {
            const double gain = k_to[c] - gamma * su * totals[c] / g.big_m;
            if (gain > best_gain + kGainEps) {
                best_gain = gain;
                best_c = c;
            }
        }
        // A fresh singleton community has gain 0.
        if (counts[a] > 0 && 0.0 > best_gain + kGainEps) {
            best_c = free_ids.back();
            free_ids.pop_back();
            best_gain = 0.0;
        }

        for (int c : touched) k_to[c] = 0.0;
        k_to[a] = 0.0;

        if (counts[a] == 0 && best_c != a) free_ids.push_back(a);
        comm[u] = best_c;
        totals[best_c] += su;
        counts[best_c] += 1;

        if (best_c != a) {
            moved_any = true;
            for (const auto& [v, w] : g.adj[u]) {
                if (comm[v] != best_c && !in_queue[v]) {
                    queue.push_back(v);
                    in_queue[v] = 1;
                }
            }
        }
    }
    return moved_any;
}

// Splits each community into well-connected refined pieces; singleton nodes
// merge into candidate pieces with probability proportional to exp(gain/theta).
std::vector<int> refine(const WGraph& g, const std::vector<int>& comm, double gamma, Rng& rng) {
    const int n = g.n;
    std::vector<int> refined(n);
    for (int u = 0; u < n; ++u) refined[u] = u;
    if (g.big_m <= 0.0) return refined;

    // Strength totals per community of the unrefined partition.
    int max_id = 0;
    for (int c : comm) max_id = std::max(max_id, c);
    std::vector<double> comm_total(max_id + 1, 0.0);
    for (int u = 0; u < n; ++u) comm_total[comm[u]] += g.strength[u];

    std::vector<double> piece_total(n), piece_ext(n);  // per refined piece
    std::vector<int> piece_size(n, 1);
    for (int u = 0; u < n; ++u) {
        piece_total[u] = g.strength[u];
        double ext = 0.0;
        for (const auto& [v, w] : g.adj[u])
            if (comm[v] == comm[u]) ext += w;
        piece_ext[u] = ext;
    }

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);

    std::vector<double> k_to(n, 0.0);
    std::vector<int> touched;
    std::vector<int> cands;
    std::vector<double> weights;
    std::vector<double> gains;

    for (int u : order) {
        if (piece_size[refined[u]] > 1) continue;
        const int c = comm[u];
        const double su = g.strength[u];
        const double rest = comm_total[c] - su;
        // Well-connectedness of u within its community.
        if (piece_ext[u] < gamma * su * rest / g.big_m - 1e-15) continue;

        touched.clear();
        for (const auto& [v, w] : g.adj[u]) {
            if (comm[v] != c || v == u) continue;
            const int r = refined[v];
            if (r == refined[u]) continue;
            if (k_to[r] == 0.0) touched.push_back(r);
            k_to[r] += w;
        }
        std::sort(touched.begin(), touched.end());

        cands.clear();
        weights.clear();
        gains.clear();
        double max_gain = -std::numeric_limits<double>::infinity();
        for (int r : touched) {
            const double pr = piece_total[r];
            // Candidate piece must itself be well-connected.
            if (piece_ext[r] < gamma * pr * (comm_total[c] - pr) / g.big_m - 1e-15) continue;
            const double gain = k_to[r] - gamma * su * pr / g.big_m;
            if (gain < -1e-15) continue;
            cands.push_back(r);
            gains.push_back(gain);
            max_gain = std::max(max_gain, gain);
        }
        if (!cands.empty()) {
            for (double gn : gains) weights.push_back(std::exp((gn - max_gain) / kRefineTheta));
            const int pick = cands[rng.categorical(weights)];
            const int old = refined[u];
            piece_total[pick] += su;
            piece_ext[pick] += piece_ext[u] - 2.0 * k_to[pick];
            piece_size[pick] += piece_size[old];
            piece_size[old] = 0;
            refined[u] = pick;
        }
        for (int r : touched) k_to[r] = 0.0;
    }
    return refined;
}

// Renumbers ids by first occurrence; returns the count.
int renumber(std::vector<int>& ids) {
    std::map<int, int> seen;
    for (int& c : ids) {
        auto [it, inserted] = seen.emplace(c, static_cast<int>(seen.size()));
        c = it->second;
    }
    return static_cast<int>(seen.size());
}

WGraph aggregate(const WGraph& g, const std::vector<int>& refined, int n_pieces) {
    WGraph a;
    a.n = n_pieces;
    a.self_w.assign(n_pieces, 0.0);
    a.adj.assign(n_pieces, {});
    std::vector<std::map<int, double>> cross(n_pieces);
    for (int u = 0; u < g.n; ++u) {
        const int cu = refined[u];
        a.self_w[cu] += g.self_w[u];
        for (const auto& [v, w] : g.adj[u]) {
            const int cv = refined[v];
            if (cu == cv)
                a.self_w[cu] += w;  // visited from both endpoints, totals 2w
            else
                cross[cu][cv] += w;
        }
    }
    for (int c = 0; c < n_pieces; ++c)
        for (const auto& [d, w] : cross[c]) a.adj[c].emplace_back(d, w);
    a.finalize();
    return a;
}

// One full Leiden pass: local moving, then refinement-based aggregation,
// recursing on the smaller graph.
std::vector<int> leiden_pass(const WGraph& g, std::vector<int> comm, double gamma, Rng& rng) {
    local_move(g, comm, gamma, rng);

    std::vector<int> refined = refine(g, comm, gamma, rng);
    std::vector<int> piece_ids = refined;
    const int n_pieces = renumber(piece_ids);
    if (n_pieces == g.n) return comm;  // nothing to aggregate

    const WGraph agg = aggregate(g, piece_ids, n_pieces);
    std::vector<int> agg_comm(n_pieces, -1);
    for (int u = 0; u < g.n; ++u) agg_comm[piece_ids[u]] = comm[u];
    renumber(agg_comm);  // keep ids within the smaller graph's range

    const std::vector<int> agg_res = leiden_pass(agg, std::move(agg_comm), gamma, rng);
    std::vector<int> out(g.n);
    for (int u = 0; u < g.n; ++u) out[u] = agg_res[piece_ids[u]];
    return out;
}

Labels to_labels(std::vector<int> comm) {
    Labels out;
    out.n_clusters = renumber(comm);
    out.assignments = std::move(comm);
    return out;
}

}  // namespace

std::vector<double> default_resolution_grid() {
    std::vector<double> grid(15);
    const double lo = std::log(0.5), hi = std::log(2.0);
    for (int i = 0; i < 15; ++i) grid[i] = std::exp(lo + (hi - lo) * i / 14.0);
    return grid;
}

Labels leiden(const Graph& g, double gamma, std::uint64_t seed) {
    if (g.n_nodes == 0) return Labels{};
    const WGraph wg = from_skeleton(g);
    Rng rng(seed);

    std::vector<int> comm(g.n_nodes);
    for (int u = 0; u < g.n_nodes; ++u) comm[u] = u;
    double q = wq(wg, comm, gamma);
    for (int round = 0; round < 100; ++round) {
        std::vector<int> next = leiden_pass(wg, comm, gamma, rng);
        const double q_next = wq(wg, next, gamma);
        if (q_next <= q + 1e-12) break;
        q = q_next;
        comm = std::move(next);
    }
    // A final flat sweep so the no-improving-single-move post-condition holds
    // for the partition actually returned.
    local_move(wg, comm, gamma, rng);
    return to_labels(std::move(comm));
}

ResolutionResult select_resolution(const Graph& g, const ClusterParams& params) {
    if (params.resolution_grid.empty())
        throw std::invalid_argument("select_resolution: empty resolution grid");
    const int n_grid = static_cast<int>(params.resolution_grid.size());

    std::vector<int> by_gamma(n_grid);
    for (int i = 0; i < n_grid; ++i) by_gamma[i] = i;
    std::sort(by_gamma.begin(), by_gamma.end(), [&](int a, int b) {
        return params.resolution_grid[a] < params.resolution_grid[b];
    });

    if (g.n_nodes == 0) return {params.resolution_grid[by_gamma[0]], Labels{}};

    std::vector<Labels> parts(n_grid);
    for (int i = 0; i < n_grid; ++i)
        parts[i] = leiden(g, params.resolution_grid[i], derive_seed(params.seed, i));

    if (n_grid == 1) return {params.resolution_grid[0], parts[0]};

    Eigen::MatrixXd pair_ami = Eigen::MatrixXd::Zero(n_grid, n_grid);
    for (int i = 0; i < n_grid; ++i)
        for (int j = i + 1; j < n_grid; ++j) {
            const double v = ami(parts[i], parts[j]);
            pair_ami(i, j) = v;
            pair_ami(j, i) = v;
        }

    int best = by_gamma[0];
    double best_mean = -std::numeric_limits<double>::infinity();
    for (int idx : by_gamma) {
        const double mean = (pair_ami.row(idx).sum()) / (n_grid - 1);
        if (mean > best_mean) {
            best_mean = mean;
            best = idx;
        }
    }
    return {params.resolution_grid[best], parts[best]};
}

namespace detail {

SpectralEmbedding spectral_embedding(const Graph& g, int k) {
    const int n = g.n_nodes;
    if (k < 1 || k > n) throw std::invalid_argument("spectral_embedding: k out of range");
    Eigen::VectorXd deg(n);
    for (int v = 0; v < n; ++v) {
        deg(v) = g.degree(v);
        if (deg(v) == 0.0) throw std::invalid_argument("spectral_embedding: isolated node");
    }
    const Eigen::VectorXd d_inv_sqrt = deg.array().rsqrt();

    // L_sym = I - D^-1/2 A D^-1/2 shares eigenvalues with L_rw; the
    // eigenvectors map back through D^-1/2.
    Eigen::MatrixXd l_sym = Eigen::MatrixXd::Zero(n, n);
    for (const Graph::Edge& e : g.edges) {
        const double v = -d_inv_sqrt(e.u) * d_inv_sqrt(e.v);
        l_sym(e.u, e.v) = v;
        l_sym(e.v, e.u) = v;
    }
    for (int v = 0; v < n; ++v) l_sym(v, v) = 1.0;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(l_sym);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("spectral_embedding: eigensolver failed to converge");

    SpectralEmbedding out;
    out.eigenvalues = solver.eigenvalues().head(k);
    out.embedding = d_inv_sqrt.asDiagonal() * solver.eigenvectors().leftCols(k);
    return out;
}

Eigen::VectorXd laplacian_eigenvalues(const Graph& g) {
    return spectral_embedding(g, g.n_nodes).eigenvalues;
}

Labels kmeans(const Eigen::MatrixXd& X, int k, int n_restarts, std::uint64_t seed) {
    const int n = static_cast<int>(X.rows());
    if (k < 1 || k > n) throw std::invalid_argument("kmeans: k out of range");
    if (n_restarts < 1) throw std::invalid_argument("kmeans: need at least one restart");

    std::vector<int> best_assign;
    double best_wcss = std::numeric_limits<double>::infinity();

    for (int restart = 0; restart < n_restarts; ++restart) {
        Rng rng(derive_seed(seed, restart));

        // D^2-weighted greedy seeding.
        Eigen::MatrixXd centers(k, X.cols());
        centers.row(0) = X.row(static_cast<int>(rng.uniform_int(n)));
        Eigen::VectorXd dist2 =
            (X.rowwise() - centers.row(0)).rowwise().squaredNorm();
        for (int c = 1; c < k; ++c) {
            std::vector<double> w(dist2.data(), dist2.data() + n);
            const int pick = static_cast<int>(rng.categorical(w));
            centers.row(c) = X.row(pick);
            dist2 = dist2.cwiseMin((X.rowwise() - centers.row(c)).rowwise().squaredNorm());
        }

        std::vector<int> assign(n, -1);
        for (int iter = 0; iter < 100; ++iter) {
            bool changed = false;
            for (int i = 0; i < n; ++i) {
                int best_c = 0;
                double best_d = (X.row(i) - centers.row(0)).squaredNorm();
                for (int c = 1; c < k; ++c) {
                    const double d = (X.row(i) - centers.row(c)).squaredNorm();
                    if (d < best_d) {
                        best_d = d;
                        best_c = c;
                    }
                }
                if (assign[i] != best_c) {
                    assign[i] = best_c;
                    changed = true;
                }
            }
            if (!changed) break;

            Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, X.cols());
            std::vector<int> counts(k, 0);
            for (int i = 0; i < n; ++i) {
                sums.row(assign[i]) += X.row(i);
                ++counts[assign[i]];
            }
            for (int c = 0; c < k; ++c) {
                if (counts[c] > 0) {
                    centers.row(c) = sums.row(c) / counts[c];
                } else {
                    // Revive an empty cluster at the point farthest from its center.
                    int far_i = 0;
                    double far_d = -1.0;
                    for (int i = 0; i < n; ++i) {
                        const double d = (X.row(i) - centers.row(assign[i])).squaredNorm();
                        if (d > far_d) {
                            far_d = d;
                            far_i = i;
                        }
                    }
                    centers.row(c) = X.row(far_i);
                }
            }
        }

        double wcss = 0.0;
        for (int i = 0; i < n; ++i) wcss += (X.row(i) - centers.row(assign[i])).squaredNorm();
        if (wcss < best_wcss) {
            best_wcss = wcss;
            best_assign = assign;
        }
    }

    Labels out;
    out.n_clusters = renumber(best_assign);
    out.assignments = std::move(best_assign);
    return out;
}

}  // namespace detail

Labels spectral_rw(const Graph& g, int k, const ClusterParams& params) {
    const detail::SpectralEmbedding emb = detail::spectral_embedding(g, k);
    return detail::kmeans(emb.embedding, k, params.n_restarts, params.seed);
}

}  // namespace simfuse
