#pragma once

#include <cstdint>
#include <vector>

namespace simfuse {

/// Per-entity integer cluster assignment. Ids are 0-based and dense in
/// [0, n_clusters).
struct Labels {
    std::vector<int> assignments;
    int n_clusters = 0;

    int n() const { return static_cast<int>(assignments.size()); }

    /// Builds a Labels whose n_clusters is max(id)+1.
    static Labels from_assignments(std::vector<int> assignments);

    bool operator==(const Labels& other) const = default;
};

/// Splits n entities into k clusters whose sizes differ by at most one,
/// assignment order randomized by seed.
Labels gen_labels(int n, int k, std::uint64_t seed);

/// Randomly merges the clusters of y into k_target non-empty super-clusters.
/// The surjection from source ids to super ids is redrawn until every super
/// id is hit, so merging can be unequal.
Labels merge_labels(const Labels& y, int k_target, std::uint64_t seed);

/// Randomly splits the clusters of y into k_target non-empty sub-clusters.
/// Sub-ids are distributed over parents by a random composition (every
/// parent gets at least one), and parent members are assigned uniformly
/// among their parent's sub-ids.
Labels split_labels(const Labels& y, int k_target, std::uint64_t seed);

/// Equal-size clustering drawn independently of any other labeling.
Labels random_labels(int n, int k, std::uint64_t seed);

/// Entity indices grouped by cluster id.
std::vector<std::vector<int>> cluster_members(const Labels& y);

/// True if every pair co-clustered in a is also co-clustered in b.
bool refines(const Labels& a, const Labels& b);

}  // namespace simfuse
