#pragma once

#include <string>

#include "simfuse/dataset.hpp"
#include "simfuse/graph.hpp"
#include "simfuse/labels.hpp"
#include "simfuse/similarity.hpp"

namespace simfuse {

/// Dense row-major float64 matrix container with a presence bitmap
/// (schema in docs/formats.md).
void save_matrix(const Eigen::MatrixXd& values, const std::vector<std::uint8_t>& present,
                 const std::string& path);
void load_matrix(const std::string& path, Eigen::MatrixXd& values,
                 std::vector<std::uint8_t>& present);

void save_similarity(const SimilarityMatrix& m, const std::string& path);
SimilarityMatrix load_similarity(const std::string& path, Orientation orientation);

/// One directory per dataset: manifest.json plus modality_<i>.sfm files.
void save_dataset(const Dataset& ds, const std::string& dir);
Dataset load_dataset(const std::string& dir);

/// Edge list, one "u v w" line per edge, preceded by "n <n_nodes>".
void save_graph(const Graph& g, const std::string& path);
Graph load_graph(const std::string& path);

/// One cluster id per line.
void save_labels(const Labels& labels, const std::string& path);
Labels load_labels(const std::string& path);

std::string stats_to_json(const GraphStats& s);
void save_stats(const GraphStats& s, const std::string& path);

}  // namespace simfuse
