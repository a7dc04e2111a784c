#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "simfuse/dataset.hpp"

namespace simfuse {

enum class Orientation { Distance, Affinity };

/// Symmetric pairwise matrix. Entries are defined only where both entities
/// are present; undefined entries hold NaN so accidental use surfaces.
struct SimilarityMatrix {
    Eigen::MatrixXd values;
    Orientation orientation = Orientation::Distance;
    std::vector<std::uint8_t> present;
    bool degenerate = false;  // set by zscore when variance collapses

    int n() const { return static_cast<int>(values.rows()); }
    bool defined(int i, int j) const { return present[i] && present[j]; }
    bool all_defined() const;
    int n_present() const;

    static SimilarityMatrix zeros(int n, Orientation o);
};

struct KernelParams {
    double mu = 0.5;
    int k_neighbors = 25;
};

/// Raw features, one-hot encoded when the modality is categorical.
Eigen::MatrixXd encoded_features(const ModalityData& X);

/// Euclidean distances between present rows.
SimilarityMatrix pairwise_euclidean(const ModalityData& X);

/// Scaled exponential kernel: W(i,j) = exp(-d^2(i,j) / (mu * eps_ij)) with
/// eps_ij = (mean d(i, N_i) + mean d(j, N_j) + d(i,j)) / 3, neighborhoods of
/// the k nearest present entities excluding self.
SimilarityMatrix scaled_affinity(const SimilarityMatrix& D, const KernelParams& params);

/// Standardizes the defined off-diagonal entries to mean 0, population std 1.
/// Diagonal untouched. Zero variance yields all-zeros with degenerate set.
SimilarityMatrix zscore(const SimilarityMatrix& S);

}  // namespace simfuse
