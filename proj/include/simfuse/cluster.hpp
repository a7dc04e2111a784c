#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "simfuse/graph.hpp"
#include "simfuse/labels.hpp"

namespace simfuse {

std::vector<double> default_resolution_grid();

struct ClusterParams {
    std::vector<double> resolution_grid = default_resolution_grid();
    int n_restarts = 10;
    int spectral_k = 2;
    std::uint64_t seed = 0;
};

/// Leiden modularity maximization at resolution gamma. The returned partition
/// is a local optimum: no single-node move increases Q. Deterministic given
/// the seed.
Labels leiden(const Graph& g, double gamma, std::uint64_t seed);

struct ResolutionResult {
    double gamma = 1.0;
    Labels labels;
};

/// Runs leiden at every grid resolution and keeps the partition with the
/// highest mean pairwise AMI against the other grid partitions; ties go to
/// the smallest gamma.
ResolutionResult select_resolution(const Graph& g, const ClusterParams& params);

/// Spectral clustering of the random-walk normalized Laplacian
/// L_rw = I - D^-1 A: k-means over the k eigenvectors with smallest
/// eigenvalues.
Labels spectral_rw(const Graph& g, int k, const ClusterParams& params);

namespace detail {

struct SpectralEmbedding {
    Eigen::MatrixXd embedding;    // n x k
    Eigen::VectorXd eigenvalues;  // k smallest, ascending
};
SpectralEmbedding spectral_embedding(const Graph& g, int k);

/// All eigenvalues of L_rw, ascending.
Eigen::VectorXd laplacian_eigenvalues(const Graph& g);

Labels kmeans(const Eigen::MatrixXd& X, int k, int n_restarts, std::uint64_t seed);

}  // namespace detail

}  // namespace simfuse
