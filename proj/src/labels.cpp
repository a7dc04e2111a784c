#include "simfuse/labels.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "simfuse/rng.hpp"

namespace simfuse {

Labels Labels::from_assignments(std::vector<int> assignments) {
    int max_id = -1;
    for (int id : assignments) {
        if (id < 0) throw std::invalid_argument("Labels: cluster ids must be non-negative");
        max_id = std::max(max_id, id);
    }
    Labels out;
    out.assignments = std::move(assignments);
    out.n_clusters = max_id + 1;
    return out;
}

Labels gen_labels(int n, int k, std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("gen_labels: k must be at least 1");
    if (k > n) throw std::invalid_argument("gen_labels: k must not exceed n");
    std::vector<int> ids;
    ids.reserve(n);
    // First n%k clusters get the extra entity.
    for (int c = 0; c < k; ++c) {
        const int size = n / k + (c < n % k ? 1 : 0);
        ids.insert(ids.end(), size, c);
    }
    Rng rng(seed);
    rng.shuffle(ids);
    Labels out;
    out.assignments = std::move(ids);
    out.n_clusters = k;
    return out;
}

Labels merge_labels(const Labels& y, int k_target, std::uint64_t seed) {
    if (k_target < 1) throw std::invalid_argument("merge_labels: k_target must be at least 1");
    if (k_target >= y.n_clusters)
        throw std::invalid_argument("merge_labels: k_target must be below the source cluster count");
    Rng rng(seed);
    std::vector<int> super_of(y.n_clusters);
    for (;;) {
        std::vector<char> hit(k_target, 0);
        for (int c = 0; c < y.n_clusters; ++c) {
            super_of[c] = static_cast<int>(rng.uniform_int(k_target));
            hit[super_of[c]] = 1;
        }
        if (std::all_of(hit.begin(), hit.end(), [](char h) { return h != 0; })) break;
    }
    Labels out;
    out.assignments.resize(y.assignments.size());
    for (std::size_t e = 0; e < y.assignments.size(); ++e)
        out.assignments[e] = super_of[y.assignments[e]];
    out.n_clusters = k_target;
    return out;
}

Labels split_labels(const Labels& y, int k_target, std::uint64_t seed) {
    const int n = y.n();
    const int k_src = y.n_clusters;
    if (k_target <= k_src)
        throw std::invalid_argument("split_labels: k_target must exceed the source cluster count");
    if (k_target > n) throw std::invalid_argument("split_labels: k_target must not exceed n");

    const auto members = cluster_members(y);
    Rng rng(seed);

    // Composition of k_target into k_src parts, each >= 1 and <= parent size
    // so that every sub-cluster can be populated.
    std::vector<int> parts(k_src);
    for (;;) {
        // Uniform composition: k_src - 1 distinct cut points in the
        // k_target - 1 gaps between unit stars.
        std::vector<int> gaps(k_target - 1);
        std::iota(gaps.begin(), gaps.end(), 1);
        rng.shuffle(gaps);
        std::vector<int> cuts(gaps.begin(), gaps.begin() + (k_src - 1));
        std::sort(cuts.begin(), cuts.end());
        cuts.push_back(k_target);
        int prev = 0;
        bool feasible = true;
        for (int c = 0; c < k_src; ++c) {
            parts[c] = cuts[c] - prev;
            prev = cuts[c];
            if (parts[c] > static_cast<int>(members[c].size())) feasible = false;
        }
        if (feasible) break;
    }

    Labels out;
    out.assignments.resize(n);
    int next_id = 0;
    for (int c = 0; c < k_src; ++c) {
        const int n_sub = parts[c];
        const auto& group = members[c];
        std::vector<int> sub(group.size());
        for (;;) {
            std::vector<char> hit(n_sub, 0);
            for (std::size_t i = 0; i < group.size(); ++i) {
                sub[i] = static_cast<int>(rng.uniform_int(n_sub));
                hit[sub[i]] = 1;
            }
            if (std::all_of(hit.begin(), hit.end(), [](char h) { return h != 0; })) break;
        }
        for (std::size_t i = 0; i < group.size(); ++i)
            out.assignments[group[i]] = next_id + sub[i];
        next_id += n_sub;
    }
    out.n_clusters = k_target;
    return out;
}

Labels random_labels(int n, int k, std::uint64_t seed) {
    return gen_labels(n, k, seed);
}

std::vector<std::vector<int>> cluster_members(const Labels& y) {
    std::vector<std::vector<int>> members(y.n_clusters);
    for (int e = 0; e < y.n(); ++e) members[y.assignments[e]].push_back(e);
    return members;
}

bool refines(const Labels& a, const Labels& b) {
    if (a.n() != b.n()) return false;
    // a refines b iff each a-cluster maps into a single b-cluster.
    std::vector<int> image(a.n_clusters, -1);
    for (int e = 0; e < a.n(); ++e) {
        int& img = image[a.assignments[e]];
        if (img == -1) {
            img = b.assignments[e];
        } else if (img != b.assignments[e]) {
            return false;
        }
    }
    return true;
}

}  // namespace simfuse
