#pragma once

#include <vector>

#include "simfuse/labels.hpp"

namespace simfuse {

/// Cross-tabulation of two labelings over the same entities.
struct Contingency {
    std::vector<std::vector<long long>> counts;  // rows: a, cols: b
    std::vector<long long> row_sums;
    std::vector<long long> col_sums;
    long long n = 0;

    static Contingency from_labels(const Labels& a, const Labels& b);
};

/// Adjusted mutual information, expected MI under the permutation model,
/// normalized by max(H(a), H(b)). 1 iff the partitions agree up to
/// relabeling.
double ami(const Labels& a, const Labels& b);

/// Adjusted Rand index (pair counting). 1 iff the partitions agree up to
/// relabeling, 0 in expectation for independent labelings.
double ari(const Labels& a, const Labels& b);

}  // namespace simfuse
