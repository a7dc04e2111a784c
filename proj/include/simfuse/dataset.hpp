#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "simfuse/labels.hpp"

namespace simfuse {

enum class Distribution { Gaussian, StudentT, Categorical };
enum class ClusterTransform { Unchanged, Merged, Split, Random };

/// How one modality embeds cluster information.
struct ModalitySpec {
    Distribution distribution = Distribution::Gaussian;
    ClusterTransform cluster_transform = ClusterTransform::Unchanged;
    int n_features = 50;
    int transform_target = 0;  // target cluster count for Merged/Split/Random
};

struct GenParams {
    double center_scale = 0.35;          // std-dev of cluster-center coordinates
    double student_t_dof = 2.0;
    int cat_n_categories = 4;
    double cat_informative_fraction = 0.3;
};

/// One feature matrix over the shared entity set. Rows whose present flag is
/// false carry no usable values and must never enter distance computations.
struct ModalityData {
    Eigen::MatrixXd features;            // n x d (category indices when categorical)
    std::vector<std::uint8_t> present;   // length n
    Labels labels;                       // the y_i this modality was generated from
    bool categorical = false;
    int n_categories = 0;

    int n() const { return static_cast<int>(features.rows()); }
    int dim() const { return static_cast<int>(features.cols()); }
    int n_present() const;
    bool all_present() const;
};

/// Shared per-feature category distributions for uninformative categorical
/// features, drawn once per dataset so they stay consistent across
/// modalities.
using SharedCategorical = std::vector<std::vector<double>>;

struct Dataset {
    std::vector<ModalityData> modalities;
    Labels truth;                         // y
    std::optional<Labels> partial_mask;   // id == n_modalities() means complete
    std::uint64_t rng_seed = 0;
    std::string problem;
    GenParams params;

    int n() const { return truth.n(); }
    int n_modalities() const { return static_cast<int>(modalities.size()); }
};

ModalityData gen_gaussian(const Labels& y_i, int d, const GenParams& params, std::uint64_t seed);
ModalityData gen_student_t(const Labels& y_i, int d, const GenParams& params, std::uint64_t seed);

SharedCategorical gen_shared_categorical(int d, const GenParams& params, std::uint64_t seed);
/// When shared is null the uninformative distributions are drawn from this
/// modality's own stream.
ModalityData gen_categorical(const Labels& y_i, int d, const GenParams& params, std::uint64_t seed,
                             const SharedCategorical* shared = nullptr);

/// Marks floor(fraction*n) uniformly chosen entities absent from one
/// uniformly chosen modality each.
Dataset mask_random(const Dataset& ds, double fraction, std::uint64_t seed);

/// Cluster-driven masking: group labels are derived from the truth by
/// merging (m < k), splitting (m > k) or identity (m == k), and within each
/// group floor(fraction*size) entities go absent from the modality the group
/// indexes.
Dataset mask_cluster(const Dataset& ds, double fraction, std::uint64_t seed);

/// Generates one modality from its spec, honoring the ground truth via the
/// spec's cluster transform.
ModalityData gen_modality(const Labels& truth, const ModalitySpec& spec, const GenParams& params,
                          std::uint64_t label_seed, std::uint64_t data_seed,
                          const SharedCategorical* shared);

/// The benchmark problem registry ("Easy", "Noisy", "2Rand", ...).
const std::vector<std::string>& problem_names();
std::vector<ModalitySpec> problem_specs(const std::string& name, int n_features);
Dataset build_problem(const std::string& name, int n, std::uint64_t seed, int n_clusters = 10,
                      int n_features = 50, const GenParams& params = {});

}  // namespace simfuse
