#include "simfuse/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace simfuse {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kDenomFloor = 1e-300;

void check_same_n(const std::vector<SimilarityMatrix>& mats) {
    if (mats.empty()) throw std::invalid_argument("need at least one matrix");
    for (const SimilarityMatrix& m : mats)
        if (m.n() != mats[0].n()) throw std::invalid_argument("matrices differ in size");
}

void check_orientation(const std::vector<SimilarityMatrix>& mats, Orientation o, const char* who) {
    for (const SimilarityMatrix& m : mats)
        if (m.orientation != o) throw std::invalid_argument(std::string(who) + ": wrong orientation");
}

void check_all_defined(const std::vector<SimilarityMatrix>& mats, const char* who) {
    for (const SimilarityMatrix& m : mats)
        if (!m.all_defined())
            throw std::invalid_argument(std::string(who) + ": inputs must be fully defined under this policy");
}

}  // namespace

std::vector<std::vector<int>> knn_neighbors(const SimilarityMatrix& S, int k) {
    const int n = S.n();
    if (k <= 0) throw std::invalid_argument("knn_neighbors: k must be positive");
    if (S.n_present() <= k)
        throw std::invalid_argument("knn_neighbors: need more than k present entities");

    const bool ascending = S.orientation == Orientation::Distance;
    std::vector<std::vector<int>> nbrs(n);
    std::vector<std::pair<double, int>> cand;
    for (int i = 0; i < n; ++i) {
        if (!S.present[i]) continue;
        cand.clear();
        for (int j = 0; j < n; ++j) {
            if (j == i || !S.present[j]) continue;
            const double v = S.values(i, j);
            cand.emplace_back(ascending ? v : -v, j);
        }
        std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
        nbrs[i].reserve(k);
        for (int t = 0; t < k; ++t) nbrs[i].push_back(cand[t].second);
    }
    return nbrs;
}

SimilarityMatrix impute_max_distance(const SimilarityMatrix& D) {
    if (D.orientation != Orientation::Distance)
        throw std::invalid_argument("impute_max_distance: distance orientation required");
    const int n = D.n();
    double max_d = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (D.defined(i, j)) max_d = std::max(max_d, D.values(i, j));

    SimilarityMatrix out = D;
    for (int i = 0; i < n; ++i) {
        out.values(i, i) = 0.0;
        for (int j = i + 1; j < n; ++j) {
            if (!D.defined(i, j)) {
                out.values(i, j) = max_d;
                out.values(j, i) = max_d;
            }
        }
    }
    out.present.assign(n, 1);
    return out;
}

SimilarityMatrix concat_features(const std::vector<ModalityData>& modalities, PartialPolicy policy) {
    if (policy != PartialPolicy::None && policy != PartialPolicy::FeatureMeanImpute)
        throw std::invalid_argument("concat_features: policy must be None or FeatureMeanImpute");
    if (modalities.empty()) throw std::invalid_argument("concat_features: no modalities");
    const int n = modalities[0].n();
    for (const ModalityData& md : modalities)
        if (md.n() != n) throw std::invalid_argument("concat_features: modalities differ in n");

    for (int i = 0; i < n; ++i) {
        const bool anywhere = std::any_of(modalities.begin(), modalities.end(),
                                          [i](const ModalityData& md) { return md.present[i] != 0; });
        if (!anywhere) throw std::invalid_argument("concat_features: entity absent from every modality");
    }
    if (policy == PartialPolicy::None)
        for (const ModalityData& md : modalities)
            if (!md.all_present())
                throw std::invalid_argument("concat_features: absent entities require FeatureMeanImpute");

    int total_d = 0;
    std::vector<Eigen::MatrixXd> blocks;
    blocks.reserve(modalities.size());
    for (const ModalityData& md : modalities) {
        Eigen::MatrixXd block = encoded_features(md);
        if (policy == PartialPolicy::FeatureMeanImpute && !md.all_present()) {
            Eigen::RowVectorXd means = Eigen::RowVectorXd::Zero(block.cols());
            int count = 0;
            for (int i = 0; i < n; ++i) {
                if (!md.present[i]) continue;
                means += block.row(i);
                ++count;
            }
            if (count == 0) throw std::invalid_argument("concat_features: modality has no present entities");
            means /= count;
            for (int i = 0; i < n; ++i)
                if (!md.present[i]) block.row(i) = means;
        }
        total_d += static_cast<int>(block.cols());
        blocks.push_back(std::move(block));
    }

    ModalityData joined;
    joined.features.resize(n, total_d);
    int col = 0;
    for (const Eigen::MatrixXd& block : blocks) {
        joined.features.middleCols(col, static_cast<int>(block.cols())) = block;
        col += static_cast<int>(block.cols());
    }
    joined.present.assign(n, 1);
    return pairwise_euclidean(joined);
}

SimilarityMatrix mean_similarity(const std::vector<SimilarityMatrix>& mats, PartialPolicy policy) {
    if (policy != PartialPolicy::None && policy != PartialPolicy::ImputeMaxDistance &&
        policy != PartialPolicy::IgnoreNaN)
        throw std::invalid_argument("mean_similarity: policy must be None, ImputeMaxDistance or IgnoreNaN");
    check_same_n(mats);
    check_orientation(mats, mats[0].orientation, "mean_similarity");
    const int n = mats[0].n();
    const int m = static_cast<int>(mats.size());

    SimilarityMatrix out = SimilarityMatrix::zeros(n, mats[0].orientation);

    if (policy == PartialPolicy::None) {
        check_all_defined(mats, "mean_similarity");
        for (const SimilarityMatrix& mat : mats) out.values += mat.values;
        out.values /= m;
        return out;
    }

    if (policy == PartialPolicy::ImputeMaxDistance) {
        for (const SimilarityMatrix& mat : mats) out.values += impute_max_distance(mat).values;
        out.values /= m;
        return out;
    }

    // IgnoreNaN: mean over the modalities where the entry is defined; empty
    // intersections fall back to the global maximum distance.
    double global_max = 0.0;
    for (const SimilarityMatrix& mat : mats)
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (mat.defined(i, j)) global_max = std::max(global_max, mat.values(i, j));

    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double sum = 0.0;
            int count = 0;
            for (const SimilarityMatrix& mat : mats) {
                if (!mat.defined(i, j)) continue;
                sum += mat.values(i, j);
                ++count;
            }
            const double v = count > 0 ? sum / count : (i == j ? 0.0 : global_max);
            out.values(i, j) = v;
            out.values(j, i) = v;
        }
    }
    return out;
}

SimilarityMatrix extreme_mean(const std::vector<SimilarityMatrix>& mats, const FusionParams& params,
                              PartialPolicy policy) {
    if (policy != PartialPolicy::None && policy != PartialPolicy::ExtremeShared)
        throw std::invalid_argument("extreme_mean: policy must be None or ExtremeShared");
    check_same_n(mats);
    check_orientation(mats, Orientation::Affinity, "extreme_mean");
    if (policy == PartialPolicy::None) check_all_defined(mats, "extreme_mean");
    const int n = mats[0].n();
    const int m = static_cast<int>(mats.size());
    const double sigma = params.threshold_sigma;

    std::vector<SimilarityMatrix> z(mats.size());
    bool degenerate = false;
    for (int v = 0; v < m; ++v) {
        z[v] = zscore(mats[v]);
        degenerate = degenerate || z[v].degenerate;
        for (int i = 0; i < n; ++i) {
            if (!z[v].present[i]) continue;
            for (int j = 0; j < n; ++j)
                if (j != i && z[v].present[j] && std::abs(z[v].values(i, j)) <= sigma)
                    z[v].values(i, j) = 0.0;
        }
    }

    SimilarityMatrix out = SimilarityMatrix::zeros(n, Orientation::Affinity);
    out.degenerate = degenerate;

    if (policy == PartialPolicy::None) {
        for (const SimilarityMatrix& zm : z) out.values += zm.values;
        out.values /= m;
        return out;
    }

    // ExtremeShared: average over the modalities where the entry is defined;
    // entries with no surviving extreme anywhere get the minimum fused value.
    std::vector<std::pair<int, int>> starved;
    double min_fused = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double sum = 0.0;
            int defined_count = 0;
            bool any_extreme = false;
            for (int v = 0; v < m; ++v) {
                if (!z[v].defined(i, j)) continue;
                ++defined_count;
                sum += z[v].values(i, j);
                if (z[v].values(i, j) != 0.0) any_extreme = true;
            }
            if (defined_count == 0 || !any_extreme) {
                starved.emplace_back(i, j);
                continue;
            }
            const double val = sum / defined_count;
            out.values(i, j) = val;
            out.values(j, i) = val;
            min_fused = std::min(min_fused, val);
        }
    }
    if (!std::isfinite(min_fused)) min_fused = 0.0;
    for (const auto& [i, j] : starved) {
        out.values(i, j) = min_fused;
        out.values(j, i) = min_fused;
    }
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        int count = 0;
        for (int v = 0; v < m; ++v) {
            if (!z[v].present[i]) continue;
            sum += z[v].values(i, i);
            ++count;
        }
        out.values(i, i) = count > 0 ? sum / count : 0.0;
    }
    return out;
}

namespace detail {

Eigen::MatrixXd snf_full_normalize(const Eigen::MatrixXd& W) {
    const int n = static_cast<int>(W.rows());
    Eigen::MatrixXd P(n, n);
    for (int i = 0; i < n; ++i) {
        const double denom = std::max(W.row(i).sum() - W(i, i), kDenomFloor);
        for (int j = 0; j < n; ++j) P(i, j) = W(i, j) / (2.0 * denom);
        P(i, i) = 0.5;
    }
    return P;
}

Eigen::MatrixXd snf_knn_normalize(const Eigen::MatrixXd& W, const std::vector<std::vector<int>>& nbrs) {
    const int n = static_cast<int>(W.rows());
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        double denom = 0.0;
        for (int j : nbrs[i]) denom += W(i, j);
        denom = std::max(denom, kDenomFloor);
        for (int j : nbrs[i]) S(i, j) = W(i, j) / denom;
    }
    return S;
}

Eigen::MatrixXd snf_diffusion_step(const Eigen::MatrixXd& S, const Eigen::MatrixXd& P_other) {
    return S * P_other * S.transpose();
}

}  // namespace detail

SnfResult snf_fuse(const std::vector<SimilarityMatrix>& mats, const FusionParams& params,
                   PartialPolicy policy) {
    if (policy != PartialPolicy::None && policy != PartialPolicy::ImputeMaxDistance)
        throw std::invalid_argument("snf_fuse: policy must be None or ImputeMaxDistance");
    if (mats.size() < 2) throw std::invalid_argument("snf_fuse: need at least 2 modalities");
    check_same_n(mats);
    check_orientation(mats, Orientation::Affinity, "snf_fuse");
    // Max-distance imputation happens before the kernel, so inputs here must
    // already be total.
    check_all_defined(mats, "snf_fuse");
    const int n = mats[0].n();
    const int m = static_cast<int>(mats.size());
    if (n <= params.kernel.k_neighbors)
        throw std::invalid_argument("snf_fuse: n must exceed k_neighbors");

    std::vector<Eigen::MatrixXd> P(m), S(m);
    for (int v = 0; v < m; ++v) {
        P[v] = detail::snf_full_normalize(mats[v].values);
        S[v] = detail::snf_knn_normalize(mats[v].values,
                                         knn_neighbors(mats[v], params.kernel.k_neighbors));
    }

    SnfResult res;
    std::vector<Eigen::MatrixXd> P_new(m);
    for (int t = 1; t <= params.snf_max_iters; ++t) {
        for (int v = 0; v < m; ++v) {
            Eigen::MatrixXd mean_other = Eigen::MatrixXd::Zero(n, n);
            for (int u = 0; u < m; ++u)
                if (u != v) mean_other += P[u];
            mean_other /= (m - 1);
            Eigen::MatrixXd next = detail::snf_diffusion_step(S[v], mean_other);
            next = 0.5 * (next + next.transpose().eval());
            P_new[v] = detail::snf_full_normalize(next);
        }

        double row_err = 0.0, rel_change = 0.0;
        for (int v = 0; v < m; ++v) {
            row_err = std::max(row_err, (P_new[v].rowwise().sum().array() - 1.0).abs().maxCoeff());
            rel_change = std::max(rel_change, (P_new[v] - P[v]).norm() / P[v].norm());
        }
        res.row_sum_errs.push_back(row_err);
        res.rel_changes.push_back(rel_change);
        P.swap(P_new);
        res.iterations = t;
        if (rel_change < params.snf_tol) {
            res.converged = true;
            break;
        }
    }

    res.fused = SimilarityMatrix::zeros(n, Orientation::Affinity);
    for (int v = 0; v < m; ++v) res.fused.values += P[v];
    res.fused.values /= m;
    // The per-iteration renormalization leaves each P row-stochastic but not
    // symmetric; the fused output contract is a symmetric matrix.
    res.fused.values = 0.5 * (res.fused.values + res.fused.values.transpose().eval());
    return res;
}

SimilarityMatrix nemo_fuse(const std::vector<SimilarityMatrix>& mats, const FusionParams& params) {
    check_same_n(mats);
    check_orientation(mats, Orientation::Affinity, "nemo_fuse");
    const int n = mats[0].n();
    const int m = static_cast<int>(mats.size());

    for (int i = 0; i < n; ++i) {
        const bool anywhere = std::any_of(mats.begin(), mats.end(),
                                          [i](const SimilarityMatrix& mat) { return mat.present[i] != 0; });
        if (!anywhere) throw std::invalid_argument("nemo_fuse: entity present in no modality");
    }

    // Per-modality relative similarity over present entities.
    std::vector<Eigen::MatrixXd> rel(m);
    for (int v = 0; v < m; ++v) {
        const SimilarityMatrix& W = mats[v];
        const auto nbrs = knn_neighbors(W, params.kernel.k_neighbors);
        std::vector<double> rowsum(n, 0.0);
        std::vector<std::vector<std::uint8_t>> in_nbr(n, std::vector<std::uint8_t>(n, 0));
        for (int i = 0; i < n; ++i) {
            for (int j : nbrs[i]) {
                rowsum[i] += W.values(i, j);
                in_nbr[i][j] = 1;
            }
            rowsum[i] = std::max(rowsum[i], kDenomFloor);
        }
        rel[v] = Eigen::MatrixXd::Constant(n, n, kNaN);
        for (int i = 0; i < n; ++i) {
            if (!W.present[i]) continue;
            rel[v](i, i) = 0.0;
            for (int j = i + 1; j < n; ++j) {
                if (!W.present[j]) continue;
                double s = 0.0;
                if (in_nbr[i][j]) s += W.values(i, j) / rowsum[i];
                if (in_nbr[j][i]) s += W.values(i, j) / rowsum[j];
                rel[v](i, j) = s;
                rel[v](j, i) = s;
            }
        }
    }

    SimilarityMatrix out = SimilarityMatrix::zeros(n, Orientation::Affinity);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double sum = 0.0;
            int count = 0;
            for (int v = 0; v < m; ++v) {
                if (!mats[v].defined(i, j)) continue;
                sum += rel[v](i, j);
                ++count;
            }
            const double val = count > 0 ? sum / count : 0.0;
            out.values(i, j) = val;
            out.values(j, i) = val;
        }
    }
    return out;
}

FuseResult fuse_modalities(const Dataset& ds, Method method, PartialPolicy policy,
                           const FusionParams& params) {
    FuseResult res;
    if (method == Method::Concat) {
        res.fused = concat_features(ds.modalities, policy);
        return res;
    }

    std::vector<SimilarityMatrix> dists;
    dists.reserve(ds.modalities.size());
    for (const ModalityData& md : ds.modalities) dists.push_back(pairwise_euclidean(md));

    switch (method) {
        case Method::Mean:
            res.fused = mean_similarity(dists, policy);
            return res;
        case Method::Extreme: {
            std::vector<SimilarityMatrix> affs;
            affs.reserve(dists.size());
            for (const SimilarityMatrix& d : dists) affs.push_back(scaled_affinity(d, params.kernel));
            res.fused = extreme_mean(affs, params, policy);
            return res;
        }
        case Method::Snf: {
            std::vector<SimilarityMatrix> affs;
            affs.reserve(dists.size());
            for (const SimilarityMatrix& d : dists) {
                const SimilarityMatrix base =
                    policy == PartialPolicy::ImputeMaxDistance ? impute_max_distance(d) : d;
                affs.push_back(scaled_affinity(base, params.kernel));
            }
            SnfResult snf = snf_fuse(affs, params, policy);
            res.fused = std::move(snf.fused);
            res.snf_converged = snf.converged;
            res.snf_iterations = snf.iterations;
            return res;
        }
        case Method::Nemo: {
            if (policy != PartialPolicy::None && policy != PartialPolicy::NemoShared)
                throw std::invalid_argument("fuse_modalities: NEMO policy must be None or NemoShared");
            std::vector<SimilarityMatrix> affs;
            affs.reserve(dists.size());
            for (const SimilarityMatrix& d : dists) affs.push_back(scaled_affinity(d, params.kernel));
            res.fused = nemo_fuse(affs, params);
            return res;
        }
        default: throw std::logic_error("fuse_modalities: unknown method");
    }
}

std::vector<PartialPolicy> partial_policies(Method method) {
    switch (method) {
        case Method::Concat: return {PartialPolicy::FeatureMeanImpute};
        case Method::Mean: return {PartialPolicy::ImputeMaxDistance, PartialPolicy::IgnoreNaN};
        case Method::Extreme: return {PartialPolicy::ExtremeShared};
        case Method::Snf: return {PartialPolicy::ImputeMaxDistance};
        case Method::Nemo: return {PartialPolicy::NemoShared};
    }
    throw std::logic_error("partial_policies: unknown method");
}

Method method_from_string(const std::string& s) {
    if (s == "concat") return Method::Concat;
    if (s == "mean") return Method::Mean;
    if (s == "extreme") return Method::Extreme;
    if (s == "snf") return Method::Snf;
    if (s == "nemo") return Method::Nemo;
    throw std::invalid_argument("unknown method: " + s);
}

std::string method_to_string(Method m) {
    switch (m) {
        case Method::Concat: return "concat";
        case Method::Mean: return "mean";
        case Method::Extreme: return "extreme";
        case Method::Snf: return "snf";
        case Method::Nemo: return "nemo";
    }
    throw std::logic_error("method_to_string: unknown method");
}

PartialPolicy policy_from_string(const std::string& s) {
    if (s == "none") return PartialPolicy::None;
    if (s == "impute_max") return PartialPolicy::ImputeMaxDistance;
    if (s == "ignore_nan") return PartialPolicy::IgnoreNaN;
    if (s == "feature_mean") return PartialPolicy::FeatureMeanImpute;
    if (s == "nemo_shared") return PartialPolicy::NemoShared;
    if (s == "extreme_shared") return PartialPolicy::ExtremeShared;
    throw std::invalid_argument("unknown policy: " + s);
}

std::string policy_to_string(PartialPolicy p) {
    switch (p) {
        case PartialPolicy::None: return "none";
        case PartialPolicy::ImputeMaxDistance: return "impute_max";
        case PartialPolicy::IgnoreNaN: return "ignore_nan";
        case PartialPolicy::FeatureMeanImpute: return "feature_mean";
        case PartialPolicy::NemoShared: return "nemo_shared";
        case PartialPolicy::ExtremeShared: return "extreme_shared";
    }
    throw std::logic_error("policy_to_string: unknown policy");
}

}  // namespace simfuse
