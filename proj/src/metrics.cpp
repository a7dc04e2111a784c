#include "simfuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace simfuse {

namespace {

void check_lengths(const Labels& a, const Labels& b) {
    if (a.n() != b.n())
        throw std::invalid_argument("partition score: labelings must have the same length");
    if (a.n() == 0) throw std::invalid_argument("partition score: empty labelings");
}

double entropy(const std::vector<long long>& sums, long long n) {
    double h = 0.0;
    for (long long s : sums) {
        if (s > 0) {
            const double p = static_cast<double>(s) / static_cast<double>(n);
            h -= p * std::log(p);
        }
    }
    return h;
}

double mutual_information(const Contingency& ct) {
    double mi = 0.0;
    const double n = static_cast<double>(ct.n);
    for (std::size_t i = 0; i < ct.counts.size(); ++i) {
        for (std::size_t j = 0; j < ct.counts[i].size(); ++j) {
            const long long nij = ct.counts[i][j];
            if (nij == 0) continue;
            const double pij = nij / n;
            mi += pij * std::log(nij * n / (static_cast<double>(ct.row_sums[i]) * ct.col_sums[j]));
        }
    }
    return std::max(mi, 0.0);
}

// Expected MI under the permutation (hypergeometric) model.
double expected_mutual_information(const Contingency& ct) {
    const long long n = ct.n;
    std::vector<double> lfact(n + 1);
    lfact[0] = 0.0;
    for (long long i = 1; i <= n; ++i) lfact[i] = lfact[i - 1] + std::log(static_cast<double>(i));

    double emi = 0.0;
    const double nd = static_cast<double>(n);
    for (long long ai : ct.row_sums) {
        if (ai == 0) continue;
        for (long long bj : ct.col_sums) {
            if (bj == 0) continue;
            const long long lo = std::max<long long>(1, ai + bj - n);
            const long long hi = std::min(ai, bj);
            for (long long nij = lo; nij <= hi; ++nij) {
                const double log_term = lfact[ai] + lfact[bj] + lfact[n - ai] + lfact[n - bj] -
                                        lfact[n] - lfact[nij] - lfact[ai - nij] - lfact[bj - nij] -
                                        lfact[n - ai - bj + nij];
                emi += (nij / nd) * std::log(nd * nij / (static_cast<double>(ai) * bj)) *
                       std::exp(log_term);
            }
        }
    }
    return emi;
}

long long pairs(long long count) { return count * (count - 1) / 2; }

}  // namespace

Contingency Contingency::from_labels(const Labels& a, const Labels& b) {
    check_lengths(a, b);
    Contingency ct;
    ct.n = a.n();
    ct.counts.assign(a.n_clusters, std::vector<long long>(b.n_clusters, 0));
    ct.row_sums.assign(a.n_clusters, 0);
    ct.col_sums.assign(b.n_clusters, 0);
    for (int e = 0; e < a.n(); ++e) {
        const int i = a.assignments[e];
        const int j = b.assignments[e];
        ++ct.counts[i][j];
        ++ct.row_sums[i];
        ++ct.col_sums[j];
    }
    return ct;
}

double ami(const Labels& a, const Labels& b) {
    check_lengths(a, b);
    const Contingency ct = Contingency::from_labels(a, b);
    const auto occupied = [](const std::vector<long long>& sums) {
        return std::count_if(sums.begin(), sums.end(), [](long long s) { return s > 0; });
    };
    const auto ka = occupied(ct.row_sums);
    const auto kb = occupied(ct.col_sums);
    if (ka == 1 && kb == 1) return 1.0;
    if (ka == ct.n && kb == ct.n) return 1.0;

    const double mi = mutual_information(ct);
    const double emi = expected_mutual_information(ct);
    const double normalizer = std::max(entropy(ct.row_sums, ct.n), entropy(ct.col_sums, ct.n));
    double denominator = normalizer - emi;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    denominator = denominator < 0 ? std::min(denominator, -eps) : std::max(denominator, eps);
    return (mi - emi) / denominator;
}

double ari(const Labels& a, const Labels& b) {
    check_lengths(a, b);
    const Contingency ct = Contingency::from_labels(a, b);
    long long sum_comb = 0;
    for (const auto& row : ct.counts)
        for (long long nij : row) sum_comb += pairs(nij);
    long long a_comb = 0, b_comb = 0;
    for (long long s : ct.row_sums) a_comb += pairs(s);
    for (long long s : ct.col_sums) b_comb += pairs(s);

    const double total = static_cast<double>(pairs(ct.n));
    const double expected = static_cast<double>(a_comb) * b_comb / total;
    const double max_index = 0.5 * (a_comb + b_comb);
    if (max_index == expected) return 1.0;  // both partitions degenerate and equal
    return (sum_comb - expected) / (max_index - expected);
}

}  // namespace simfuse
