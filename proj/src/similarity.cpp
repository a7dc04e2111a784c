#include "simfuse/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace simfuse {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kEpsFloor = 1e-12;
}  // namespace

bool SimilarityMatrix::all_defined() const {
    return std::all_of(present.begin(), present.end(), [](std::uint8_t p) { return p != 0; });
}

int SimilarityMatrix::n_present() const {
    return static_cast<int>(std::count(present.begin(), present.end(), std::uint8_t{1}));
}

SimilarityMatrix SimilarityMatrix::zeros(int n, Orientation o) {
    SimilarityMatrix out;
    out.values = Eigen::MatrixXd::Zero(n, n);
    out.orientation = o;
    out.present.assign(n, 1);
    return out;
}

Eigen::MatrixXd encoded_features(const ModalityData& X) {
    if (!X.categorical) return X.features;
    const int n = X.n();
    const int d = X.dim();
    const int q = X.n_categories;
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, d * q);
    for (int i = 0; i < n; ++i) {
        if (!X.present[i]) continue;
        for (int j = 0; j < d; ++j) {
            const int c = static_cast<int>(X.features(i, j));
            if (c < 0 || c >= q) throw std::invalid_argument("encoded_features: category out of range");
            out(i, j * q + c) = 1.0;
        }
    }
    return out;
}

SimilarityMatrix pairwise_euclidean(const ModalityData& X) {
    const int n = X.n();
    if (X.n_present() < 2)
        throw std::invalid_argument("pairwise_euclidean: need at least 2 present entities");
    const Eigen::MatrixXd E = encoded_features(X);

    SimilarityMatrix out;
    out.orientation = Orientation::Distance;
    out.present = X.present;
    out.values.setConstant(n, n, kNaN);
    for (int i = 0; i < n; ++i) {
        if (!X.present[i]) continue;
        out.values(i, i) = 0.0;
        for (int j = i + 1; j < n; ++j) {
            if (!X.present[j]) continue;
            const double d = (E.row(i) - E.row(j)).norm();
            out.values(i, j) = d;
            out.values(j, i) = d;
        }
    }
    return out;
}

SimilarityMatrix scaled_affinity(const SimilarityMatrix& D, const KernelParams& params) {
    if (D.orientation != Orientation::Distance)
        throw std::invalid_argument("scaled_affinity: input must be a distance matrix");
    const int n = D.n();
    const int k = params.k_neighbors;
    if (D.n_present() < k + 1)
        throw std::invalid_argument("scaled_affinity: need at least k_neighbors+1 present entities");

    // Mean distance from each present entity to its k nearest present
    // neighbors, self excluded, ties broken by ascending index.
    std::vector<double> knn_mean(n, kNaN);
    std::vector<std::pair<double, int>> cand;
    for (int i = 0; i < n; ++i) {
        if (!D.present[i]) continue;
        cand.clear();
        for (int j = 0; j < n; ++j)
            if (j != i && D.present[j]) cand.emplace_back(D.values(i, j), j);
        std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
        double s = 0.0;
        for (int t = 0; t < k; ++t) s += cand[t].first;
        knn_mean[i] = s / k;
    }

    SimilarityMatrix out;
    out.orientation = Orientation::Affinity;
    out.present = D.present;
    out.values.setConstant(n, n, kNaN);
    for (int i = 0; i < n; ++i) {
        if (!D.present[i]) continue;
        for (int j = i; j < n; ++j) {
            if (!D.present[j]) continue;
            const double d = D.values(i, j);
            const double eps = std::max((knn_mean[i] + knn_mean[j] + d) / 3.0, kEpsFloor);
            const double w = std::exp(-(d * d) / (params.mu * eps));
            out.values(i, j) = w;
            out.values(j, i) = w;
        }
    }
    return out;
}

SimilarityMatrix zscore(const SimilarityMatrix& S) {
    const int n = S.n();
    double sum = 0.0, sum_sq = 0.0;
    long count = 0;
    for (int i = 0; i < n; ++i) {
        if (!S.present[i]) continue;
        for (int j = i + 1; j < n; ++j) {
            if (!S.present[j]) continue;
            const double v = S.values(i, j);
            sum += v;
            sum_sq += v * v;
            ++count;
        }
    }
    if (count < 2) throw std::invalid_argument("zscore: need at least 2 defined off-diagonal entries");

    const double mean = sum / count;
    const double var = std::max(sum_sq / count - mean * mean, 0.0);
    const double std_dev = std::sqrt(var);

    SimilarityMatrix out = S;
    if (std_dev == 0.0) {
        out.degenerate = true;
        for (int i = 0; i < n; ++i) {
            if (!S.present[i]) continue;
            for (int j = 0; j < n; ++j)
                if (j != i && S.present[j]) out.values(i, j) = 0.0;
        }
        return out;
    }
    for (int i = 0; i < n; ++i) {
        if (!S.present[i]) continue;
        for (int j = 0; j < n; ++j)
            if (j != i && S.present[j]) out.values(i, j) = (S.values(i, j) - mean) / std_dev;
    }
    return out;
}

}  // namespace simfuse
