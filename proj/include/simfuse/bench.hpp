#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "simfuse/cluster.hpp"
#include "simfuse/dataset.hpp"
#include "simfuse/integrate.hpp"

namespace simfuse {

struct ExperimentConfig {
    std::vector<std::string> problems = {"all"};
    int n_entities = 500;
    int n_clusters = 10;
    int n_features = 30;
    int n_instances = 10;
    std::vector<std::string> methods = {"concat", "mean", "extreme", "snf", "nemo"};
    std::vector<std::string> clusterers = {"leiden", "spectral"};
    std::string partial_mode = "none";  // none | random | cluster
    std::vector<double> fractions = {0.0};
    bool baseline = false;
    std::uint64_t base_seed = 20240101;
    std::string output_path = "results.csv";
    int n_threads = 1;
    GenParams gen;
    FusionParams fusion = [] {
        FusionParams p;
        p.kernel.k_neighbors = 15;
        return p;
    }();
    ClusterParams cluster;

    /// Resolves "all" into the registry names and validates fields.
    std::vector<std::string> resolved_problems() const;
    void validate() const;
};

ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ExperimentConfig& cfg);

struct ExperimentRecord {
    std::string problem;
    std::uint64_t instance_seed = 0;
    std::string method;
    std::string policy;
    std::string clusterer;
    std::string partial_mode = "none";
    double fraction = 0.0;
    double gamma = kUnset;  // leiden only
    double ami_truth = kUnset;
    double ari_truth = kUnset;
    double ami_mask = kUnset;  // masked runs only
    double modularity_truth = kUnset;
    double tpr_truth = kUnset;
    double assortativity = kUnset;
    double mean_path_length = kUnset;
    double mean_degree = kUnset;
    double median_degree = kUnset;
    double wall_time_s = 0.0;
    std::string error;

    static constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();
    /// Identity of a record for resume bookkeeping (all key columns).
    std::string key() const;
};

std::string record_header();
std::string record_to_csv(const ExperimentRecord& r);
ExperimentRecord record_from_csv(const std::string& line);
std::vector<ExperimentRecord> read_records(const std::string& path);

/// Runs the configured grid, appending records to cfg.output_path as tasks
/// finish (in deterministic task order) and writing a JSON manifest next to
/// it. Existing records in the output file are kept and their keys skipped.
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg);

/// Per-modality KNN baselines ("single_<i>" rows), complete data only.
std::vector<ExperimentRecord> single_modality_baseline(const ExperimentConfig& cfg);

struct SummaryRow {
    std::vector<std::string> key;
    int count = 0;
    double mean_ami = 0.0;
    double max_ami = 0.0;
    double std_ami = 0.0;
};

/// Groups records by the given key columns (subset of problem, method,
/// policy, clusterer, partial_mode, fraction) and reports mean/max/sample-std
/// of ami_truth. Rows with errors are skipped.
std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records,
                                  const std::vector<std::string>& group_keys);
std::string summary_to_table(const std::vector<SummaryRow>& rows,
                             const std::vector<std::string>& group_keys);

}  // namespace simfuse
