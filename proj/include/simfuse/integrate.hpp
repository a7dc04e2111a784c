#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "simfuse/dataset.hpp"
#include "simfuse/similarity.hpp"

namespace simfuse {

enum class PartialPolicy { None, ImputeMaxDistance, IgnoreNaN, FeatureMeanImpute, NemoShared, ExtremeShared };
enum class Method { Concat, Mean, Extreme, Snf, Nemo };

struct FusionParams {
    KernelParams kernel;
    double threshold_sigma = 1.0;
    int snf_max_iters = 20;
    double snf_tol = 1e-6;
};

/// Ordered k nearest present entities per entity (self excluded, ties by
/// ascending index, proximity per the matrix orientation). Empty for absent
/// entities.
std::vector<std::vector<int>> knn_neighbors(const SimilarityMatrix& S, int k);

/// Replaces undefined off-diagonal entries of a distance matrix with its
/// maximum defined value; absent diagonals become 0.
SimilarityMatrix impute_max_distance(const SimilarityMatrix& D);

/// Early integration: horizontal concatenation (one-hot encoding categorical
/// blocks) followed by pairwise Euclidean distance.
SimilarityMatrix concat_features(const std::vector<ModalityData>& modalities, PartialPolicy policy);

/// Elementwise mean of the input matrices.
SimilarityMatrix mean_similarity(const std::vector<SimilarityMatrix>& mats, PartialPolicy policy);

/// Per modality: z-score the affinities, keep entries with |z| exceeding
/// threshold_sigma, zero the rest; average across modalities.
SimilarityMatrix extreme_mean(const std::vector<SimilarityMatrix>& mats, const FusionParams& params,
                              PartialPolicy policy);

struct SnfResult {
    SimilarityMatrix fused;
    int iterations = 0;
    bool converged = false;
    std::vector<double> row_sum_errs;  // max |row sum - 1| over all P after each iteration
    std::vector<double> rel_changes;   // max relative Frobenius change per iteration
};

/// Similarity network fusion: full and KNN-local normalizations, then
/// simultaneous cross-modality diffusion with re-symmetrization and
/// re-normalization each iteration, averaged at the end.
SnfResult snf_fuse(const std::vector<SimilarityMatrix>& mats, const FusionParams& params,
                   PartialPolicy policy);

/// NEMO relative similarity: within-KNN row-normalized affinity summed over
/// both directions, averaged over the modalities where both entities are
/// present.
SimilarityMatrix nemo_fuse(const std::vector<SimilarityMatrix>& mats, const FusionParams& params);

namespace detail {
/// Full normalization: off-diagonal W(i,j) / (2 sum_{k != i} W(i,k)), diagonal 1/2.
Eigen::MatrixXd snf_full_normalize(const Eigen::MatrixXd& W);
/// KNN-local normalization: W(i,j) / sum_{k in N_i} W(i,k) for j in N_i, else 0.
Eigen::MatrixXd snf_knn_normalize(const Eigen::MatrixXd& W, const std::vector<std::vector<int>>& nbrs);
/// One diffusion product: S * P_other * S^T.
Eigen::MatrixXd snf_diffusion_step(const Eigen::MatrixXd& S, const Eigen::MatrixXd& P_other);
}  // namespace detail

struct FuseResult {
    SimilarityMatrix fused;
    bool snf_converged = true;
    int snf_iterations = 0;
};

/// Runs the full per-method chain: encode, optionally impute distances, apply
/// the method's designated kernel (raw distance for Concat and Mean, scaled
/// affinity for SNF, NEMO and Extreme Mean), then fuse.
FuseResult fuse_modalities(const Dataset& ds, Method method, PartialPolicy policy,
                           const FusionParams& params);

/// The partial-data policies applicable to a method on masked data (Mean has
/// two variants: imputing the max distance and ignoring NaN entries).
std::vector<PartialPolicy> partial_policies(Method method);

Method method_from_string(const std::string& s);
std::string method_to_string(Method m);
PartialPolicy policy_from_string(const std::string& s);
std::string policy_to_string(PartialPolicy p);

}  // namespace simfuse
