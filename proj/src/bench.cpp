#include "simfuse/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "simfuse/graph.hpp"
#include "simfuse/metrics.hpp"
#include "simfuse/rng.hpp"

namespace simfuse {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_field(double v) { return std::isnan(v) ? std::string() : fmt_double(v); }

double parse_field(const std::string& s) {
    return s.empty() ? ExperimentRecord::kUnset : std::stod(s);
}

std::string sanitize(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::vector<std::string> ExperimentConfig::resolved_problems() const {
    if (problems.size() == 1 && problems[0] == "all") return problem_names();
    return problems;
}

void ExperimentConfig::validate() const {
    if (n_instances < 1) throw std::invalid_argument("config: n_instances must be >= 1");
    if (n_entities < 2) throw std::invalid_argument("config: n_entities must be >= 2");
    if (n_clusters < 1 || n_clusters > n_entities)
        throw std::invalid_argument("config: n_clusters out of range");
    if (n_features < 1) throw std::invalid_argument("config: n_features must be >= 1");
    if (n_threads < 1) throw std::invalid_argument("config: n_threads must be >= 1");
    if (partial_mode != "none" && partial_mode != "random" && partial_mode != "cluster")
        throw std::invalid_argument("config: partial_mode must be none, random or cluster");
    for (double f : fractions)
        if (f < 0.0 || f > 1.0) throw std::invalid_argument("config: fractions must lie in [0, 1]");
    if (fractions.empty()) throw std::invalid_argument("config: fractions must be non-empty");
    if (methods.empty() && !baseline)
        throw std::invalid_argument("config: no methods selected and baseline disabled");
    if (clusterers.empty()) throw std::invalid_argument("config: clusterers must be non-empty");
    for (const std::string& m : methods) method_from_string(m);
    for (const std::string& c : clusterers)
        if (c != "leiden" && c != "spectral")
            throw std::invalid_argument("config: unknown clusterer " + c);
    for (const std::string& p : resolved_problems()) problem_specs(p, n_features);
    if (fusion.kernel.k_neighbors >= n_entities)
        throw std::invalid_argument("config: k_neighbors must be below n_entities");
}

ExperimentConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }

    ExperimentConfig cfg;
    const std::set<std::string> known = {
        "problems",      "n_entities",     "n_clusters",    "n_features",
        "n_instances",   "methods",        "clusterers",    "partial_mode",
        "fractions",     "baseline",       "base_seed",     "output",
        "n_threads",     "center_scale",   "student_t_dof", "cat_n_categories",
        "cat_informative_fraction",        "mu",            "k_neighbors",
        "threshold_sigma", "snf_max_iters", "snf_tol",      "resolution_grid",
        "n_restarts"};
    for (const auto& [key, value] : j.items())
        if (known.find(key) == known.end())
            throw std::invalid_argument("config: unknown key \"" + key + "\"");

    try {
        if (j.contains("problems")) cfg.problems = j["problems"].get<std::vector<std::string>>();
        if (j.contains("n_entities")) cfg.n_entities = j["n_entities"].get<int>();
        if (j.contains("n_clusters")) cfg.n_clusters = j["n_clusters"].get<int>();
        if (j.contains("n_features")) cfg.n_features = j["n_features"].get<int>();
        if (j.contains("n_instances")) cfg.n_instances = j["n_instances"].get<int>();
        if (j.contains("methods")) cfg.methods = j["methods"].get<std::vector<std::string>>();
        if (j.contains("clusterers")) cfg.clusterers = j["clusterers"].get<std::vector<std::string>>();
        if (j.contains("partial_mode")) cfg.partial_mode = j["partial_mode"].get<std::string>();
        if (j.contains("fractions")) cfg.fractions = j["fractions"].get<std::vector<double>>();
        if (j.contains("baseline")) cfg.baseline = j["baseline"].get<bool>();
        if (j.contains("base_seed")) cfg.base_seed = j["base_seed"].get<std::uint64_t>();
        if (j.contains("output")) cfg.output_path = j["output"].get<std::string>();
        if (j.contains("n_threads")) cfg.n_threads = j["n_threads"].get<int>();
        if (j.contains("center_scale")) cfg.gen.center_scale = j["center_scale"].get<double>();
        if (j.contains("student_t_dof")) cfg.gen.student_t_dof = j["student_t_dof"].get<double>();
        if (j.contains("cat_n_categories")) cfg.gen.cat_n_categories = j["cat_n_categories"].get<int>();
        if (j.contains("cat_informative_fraction"))
            cfg.gen.cat_informative_fraction = j["cat_informative_fraction"].get<double>();
        if (j.contains("mu")) cfg.fusion.kernel.mu = j["mu"].get<double>();
        if (j.contains("k_neighbors")) cfg.fusion.kernel.k_neighbors = j["k_neighbors"].get<int>();
        if (j.contains("threshold_sigma")) cfg.fusion.threshold_sigma = j["threshold_sigma"].get<double>();
        if (j.contains("snf_max_iters")) cfg.fusion.snf_max_iters = j["snf_max_iters"].get<int>();
        if (j.contains("snf_tol")) cfg.fusion.snf_tol = j["snf_tol"].get<double>();
        if (j.contains("resolution_grid"))
            cfg.cluster.resolution_grid = j["resolution_grid"].get<std::vector<double>>();
        if (j.contains("n_restarts")) cfg.cluster.n_restarts = j["n_restarts"].get<int>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: bad field type: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
    json j;
    j["problems"] = cfg.problems;
    j["n_entities"] = cfg.n_entities;
    j["n_clusters"] = cfg.n_clusters;
    j["n_features"] = cfg.n_features;
    j["n_instances"] = cfg.n_instances;
    j["methods"] = cfg.methods;
    j["clusterers"] = cfg.clusterers;
    j["partial_mode"] = cfg.partial_mode;
    j["fractions"] = cfg.fractions;
    j["baseline"] = cfg.baseline;
    j["base_seed"] = cfg.base_seed;
    j["output"] = cfg.output_path;
    j["n_threads"] = cfg.n_threads;
    j["center_scale"] = cfg.gen.center_scale;
    j["student_t_dof"] = cfg.gen.student_t_dof;
    j["cat_n_categories"] = cfg.gen.cat_n_categories;
    j["cat_informative_fraction"] = cfg.gen.cat_informative_fraction;
    j["mu"] = cfg.fusion.kernel.mu;
    j["k_neighbors"] = cfg.fusion.kernel.k_neighbors;
    j["threshold_sigma"] = cfg.fusion.threshold_sigma;
    j["snf_max_iters"] = cfg.fusion.snf_max_iters;
    j["snf_tol"] = cfg.fusion.snf_tol;
    j["resolution_grid"] = cfg.cluster.resolution_grid;
    j["n_restarts"] = cfg.cluster.n_restarts;
    return j.dump(2);
}

std::string ExperimentRecord::key() const {
    return problem + "|" + std::to_string(instance_seed) + "|" + method + "|" + policy + "|" +
           clusterer + "|" + partial_mode + "|" + fmt_double(fraction);
}

std::string record_header() {
    return "problem,instance_seed,method,policy,clusterer,partial_mode,fraction,gamma,"
           "ami_truth,ari_truth,ami_mask,modularity_truth,tpr_truth,assortativity,"
           "mean_path_length,mean_degree,median_degree,wall_time_s,error";
}

std::string record_to_csv(const ExperimentRecord& r) {
    std::ostringstream out;
    out << sanitize(r.problem) << ',' << r.instance_seed << ',' << r.method << ',' << r.policy << ','
        << r.clusterer << ',' << r.partial_mode << ',' << fmt_double(r.fraction) << ','
        << fmt_field(r.gamma) << ',' << fmt_field(r.ami_truth) << ',' << fmt_field(r.ari_truth)
        << ',' << fmt_field(r.ami_mask) << ',' << fmt_field(r.modularity_truth) << ','
        << fmt_field(r.tpr_truth) << ',' << fmt_field(r.assortativity) << ','
        << fmt_field(r.mean_path_length) << ',' << fmt_field(r.mean_degree) << ','
        << fmt_field(r.median_degree) << ',' << fmt_double(r.wall_time_s) << ','
        << sanitize(r.error);
    return out.str();
}

ExperimentRecord record_from_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    if (fields.size() != 19) throw std::invalid_argument("record: expected 19 fields");

    ExperimentRecord r;
    r.problem = fields[0];
    r.instance_seed = std::stoull(fields[1]);
    r.method = fields[2];
    r.policy = fields[3];
    r.clusterer = fields[4];
    r.partial_mode = fields[5];
    r.fraction = std::stod(fields[6]);
    r.gamma = parse_field(fields[7]);
    r.ami_truth = parse_field(fields[8]);
    r.ari_truth = parse_field(fields[9]);
    r.ami_mask = parse_field(fields[10]);
    r.modularity_truth = parse_field(fields[11]);
    r.tpr_truth = parse_field(fields[12]);
    r.assortativity = parse_field(fields[13]);
    r.mean_path_length = parse_field(fields[14]);
    r.mean_degree = parse_field(fields[15]);
    r.median_degree = parse_field(fields[16]);
    r.wall_time_s = std::stod(fields[17]);
    r.error = fields[18];
    return r;
}

std::vector<ExperimentRecord> read_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open records file: " + path);
    std::vector<ExperimentRecord> records;
    std::string line;
    if (!std::getline(in, line)) return records;
    if (line != record_header()) throw std::runtime_error("unrecognized records header in " + path);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        records.push_back(record_from_csv(line));
    }
    return records;
}

namespace {

struct PipelineScores {
    Labels labels;
    double gamma = ExperimentRecord::kUnset;
};

// Everything done once per (dataset, method, policy): fuse, graph, stats.
struct FusedContext {
    GraphStats stats;
    Graph graph;
};

void fill_stats(ExperimentRecord& r, const GraphStats& s) {
    r.modularity_truth = s.modularity_truth;
    r.tpr_truth = s.tpr_truth;
    r.assortativity = s.assortativity.defined ? s.assortativity.value : ExperimentRecord::kUnset;
    r.mean_path_length =
        s.mean_path_length.defined ? s.mean_path_length.value : ExperimentRecord::kUnset;
    r.mean_degree = s.mean_degree;
    r.median_degree = s.median_degree;
}

PipelineScores run_clusterer(const Graph& g, const std::string& clusterer,
                             const ExperimentConfig& cfg, std::uint64_t instance_seed,
                             int clusterer_index) {
    ClusterParams cp = cfg.cluster;
    cp.seed = derive_seed(instance_seed, 500 + static_cast<std::uint64_t>(clusterer_index));
    cp.spectral_k = cfg.n_clusters;
    PipelineScores out;
    if (clusterer == "leiden") {
        ResolutionResult rr = select_resolution(g, cp);
        out.labels = std::move(rr.labels);
        out.gamma = rr.gamma;
    } else {
        out.labels = spectral_rw(g, cfg.n_clusters, cp);
    }
    return out;
}

// One (problem, instance) worth of records, in deterministic order.
std::vector<ExperimentRecord> run_instance(const ExperimentConfig& cfg, const std::string& problem,
                                           int instance) {
    const std::uint64_t instance_seed = cfg.base_seed + static_cast<std::uint64_t>(instance);
    std::vector<ExperimentRecord> records;

    // An instance that cannot even be generated still yields one error record
    // per (method, clusterer) so the run continues and the failure is visible.
    auto record_failure = [&](double fraction, const std::string& what) {
        for (const std::string& method_name : cfg.methods)
            for (const std::string& clusterer : cfg.clusterers) {
                ExperimentRecord r;
                r.problem = problem;
                r.instance_seed = instance_seed;
                r.method = method_name;
                r.policy = "none";
                r.clusterer = clusterer;
                r.partial_mode = cfg.partial_mode;
                r.fraction = fraction;
                r.error = what;
                records.push_back(std::move(r));
            }
    };

    Dataset base;
    try {
        base = build_problem(problem, cfg.n_entities, instance_seed, cfg.n_clusters, cfg.n_features,
                             cfg.gen);
    } catch (const std::exception& e) {
        record_failure(0.0, e.what());
        return records;
    }
    const bool masked_mode = cfg.partial_mode != "none";

    for (std::size_t fidx = 0; fidx < (masked_mode ? cfg.fractions.size() : 1); ++fidx) {
        const double fraction = masked_mode ? cfg.fractions[fidx] : 0.0;
        Dataset ds;
        try {
            ds = base;
            if (masked_mode) {
                const std::uint64_t mask_seed = derive_seed(instance_seed, 400 + fidx);
                ds = cfg.partial_mode == "random" ? mask_random(base, fraction, mask_seed)
                                                  : mask_cluster(base, fraction, mask_seed);
            }
        } catch (const std::exception& e) {
            record_failure(fraction, e.what());
            continue;
        }

        for (const std::string& method_name : cfg.methods) {
            const Method method = method_from_string(method_name);
            const std::vector<PartialPolicy> policies =
                masked_mode ? partial_policies(method) : std::vector<PartialPolicy>{PartialPolicy::None};

            for (PartialPolicy policy : policies) {
                ExperimentRecord proto;
                proto.problem = problem;
                proto.instance_seed = instance_seed;
                proto.method = method_name;
                proto.policy = policy_to_string(policy);
                proto.partial_mode = cfg.partial_mode;
                proto.fraction = fraction;

                const auto t0 = std::chrono::steady_clock::now();
                Graph graph;
                GraphStats stats;
                std::string fuse_error;
                double fuse_seconds = 0.0;
                try {
                    FuseResult fused = fuse_modalities(ds, method, policy, cfg.fusion);
                    graph = knn_graph(fused.fused, cfg.fusion.kernel.k_neighbors);
                    stats = compute_stats(graph, ds.truth);
                    fuse_seconds = seconds_since(t0);
                } catch (const std::exception& e) {
                    fuse_error = e.what();
                }

                for (std::size_t ci = 0; ci < cfg.clusterers.size(); ++ci) {
                    ExperimentRecord r = proto;
                    r.clusterer = cfg.clusterers[ci];
                    if (!fuse_error.empty()) {
                        r.error = fuse_error;
                        r.wall_time_s = seconds_since(t0);
                        records.push_back(std::move(r));
                        continue;
                    }
                    const auto tc = std::chrono::steady_clock::now();
                    try {
                        PipelineScores scores =
                            run_clusterer(graph, r.clusterer, cfg, instance_seed, static_cast<int>(ci));
                        r.gamma = scores.gamma;
                        r.ami_truth = ami(scores.labels, ds.truth);
                        r.ari_truth = ari(scores.labels, ds.truth);
                        if (ds.partial_mask) r.ami_mask = ami(scores.labels, *ds.partial_mask);
                        fill_stats(r, stats);
                    } catch (const std::exception& e) {
                        r.error = e.what();
                    }
                    r.wall_time_s = fuse_seconds + seconds_since(tc);
                    records.push_back(std::move(r));
                }
            }
        }

        if (cfg.baseline && !masked_mode) {
            for (std::size_t mi = 0; mi < ds.modalities.size(); ++mi) {
                ExperimentRecord proto;
                proto.problem = problem;
                proto.instance_seed = instance_seed;
                proto.method = "single_" + std::to_string(mi);
                proto.policy = "none";
                proto.partial_mode = cfg.partial_mode;
                proto.fraction = fraction;

                const auto t0 = std::chrono::steady_clock::now();
                Graph graph;
                GraphStats stats;
                std::string fuse_error;
                double fuse_seconds = 0.0;
                try {
                    const SimilarityMatrix dist = pairwise_euclidean(ds.modalities[mi]);
                    graph = knn_graph(dist, cfg.fusion.kernel.k_neighbors);
                    stats = compute_stats(graph, ds.truth);
                    fuse_seconds = seconds_since(t0);
                } catch (const std::exception& e) {
                    fuse_error = e.what();
                }

                for (std::size_t ci = 0; ci < cfg.clusterers.size(); ++ci) {
                    ExperimentRecord r = proto;
                    r.clusterer = cfg.clusterers[ci];
                    if (!fuse_error.empty()) {
                        r.error = fuse_error;
                        r.wall_time_s = seconds_since(t0);
                        records.push_back(std::move(r));
                        continue;
                    }
                    const auto tc = std::chrono::steady_clock::now();
                    try {
                        PipelineScores scores =
                            run_clusterer(graph, r.clusterer, cfg, instance_seed, static_cast<int>(ci));
                        r.gamma = scores.gamma;
                        r.ami_truth = ami(scores.labels, ds.truth);
                        r.ari_truth = ari(scores.labels, ds.truth);
                        fill_stats(r, stats);
                    } catch (const std::exception& e) {
                        r.error = e.what();
                    }
                    r.wall_time_s = fuse_seconds + seconds_since(tc);
                    records.push_back(std::move(r));
                }
            }
        }
    }
    return records;
}

void write_manifest(const ExperimentConfig& cfg) {
    json manifest;
    manifest["format_version"] = 1;
    manifest["tool"] = "simfuse";
    manifest["config"] = json::parse(config_to_json_text(cfg));
    manifest["resolved_problems"] = cfg.resolved_problems();
    json seeds = json::array();
    for (int i = 0; i < cfg.n_instances; ++i)
        seeds.push_back(cfg.base_seed + static_cast<std::uint64_t>(i));
    manifest["instance_seeds"] = seeds;

    const std::string path = cfg.output_path + ".manifest.json";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest: " + path);
    out << manifest.dump(2) << '\n';
}

}  // namespace

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();

    std::set<std::string> done;
    std::vector<ExperimentRecord> existing;
    const bool resuming = std::filesystem::exists(cfg.output_path);
    if (resuming) {
        existing = read_records(cfg.output_path);
        for (const ExperimentRecord& r : existing) done.insert(r.key());
    }

    write_manifest(cfg);

    std::ofstream out(cfg.output_path, std::ios::app);
    if (!out) throw std::runtime_error("cannot open output: " + cfg.output_path);
    if (!resuming) out << record_header() << '\n';

    struct Task {
        std::string problem;
        int instance;
    };
    std::vector<Task> tasks;
    for (const std::string& problem : cfg.resolved_problems())
        for (int i = 0; i < cfg.n_instances; ++i) tasks.push_back({problem, i});

    std::vector<std::vector<ExperimentRecord>> results(tasks.size());

    if (cfg.n_threads <= 1) {
        for (std::size_t t = 0; t < tasks.size(); ++t)
            results[t] = run_instance(cfg, tasks[t].problem, tasks[t].instance);
    } else {
        // Pre-assigned seeds make tasks independent; the sink below flushes in
        // task order, so worker scheduling cannot change the output.
        std::mutex mu;
        std::size_t next = 0;
        auto worker = [&]() {
            for (;;) {
                std::size_t t;
                {
                    std::lock_guard<std::mutex> lock(mu);
                    if (next >= tasks.size()) return;
                    t = next++;
                }
                results[t] = run_instance(cfg, tasks[t].problem, tasks[t].instance);
            }
        };
        std::vector<std::thread> pool;
        const int n_workers = std::min<int>(cfg.n_threads, static_cast<int>(tasks.size()));
        pool.reserve(n_workers);
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }

    std::vector<ExperimentRecord> all = std::move(existing);
    for (std::vector<ExperimentRecord>& batch : results) {
        for (ExperimentRecord& r : batch) {
            if (done.count(r.key())) continue;
            out << record_to_csv(r) << '\n';
            all.push_back(std::move(r));
        }
        out.flush();
    }
    return all;
}

std::vector<ExperimentRecord> single_modality_baseline(const ExperimentConfig& cfg) {
    ExperimentConfig baseline_cfg = cfg;
    baseline_cfg.baseline = true;
    baseline_cfg.methods.clear();
    baseline_cfg.partial_mode = "none";
    baseline_cfg.fractions = {0.0};
    return run_experiment(baseline_cfg);
}

std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records,
                                  const std::vector<std::string>& group_keys) {
    auto field_of = [](const ExperimentRecord& r, const std::string& key) -> std::string {
        if (key == "problem") return r.problem;
        if (key == "method") return r.method;
        if (key == "policy") return r.policy;
        if (key == "clusterer") return r.clusterer;
        if (key == "partial_mode") return r.partial_mode;
        if (key == "fraction") return fmt_double(r.fraction);
        throw std::invalid_argument("summarize: unknown group key " + key);
    };

    std::map<std::vector<std::string>, std::vector<double>> groups;
    for (const ExperimentRecord& r : records) {
        if (!r.error.empty() || std::isnan(r.ami_truth)) continue;
        std::vector<std::string> key;
        key.reserve(group_keys.size());
        for (const std::string& k : group_keys) key.push_back(field_of(r, k));
        groups[key].push_back(r.ami_truth);
    }

    std::vector<SummaryRow> rows;
    for (const auto& [key, vals] : groups) {
        SummaryRow row;
        row.key = key;
        row.count = static_cast<int>(vals.size());
        double sum = 0.0, maxv = vals[0];
        for (double v : vals) {
            sum += v;
            maxv = std::max(maxv, v);
        }
        row.mean_ami = sum / vals.size();
        row.max_ami = maxv;
        double ss = 0.0;
        for (double v : vals) ss += (v - row.mean_ami) * (v - row.mean_ami);
        row.std_ami = vals.size() > 1 ? std::sqrt(ss / (vals.size() - 1)) : 0.0;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string summary_to_table(const std::vector<SummaryRow>& rows,
                             const std::vector<std::string>& group_keys) {
    std::ostringstream out;
    for (const std::string& k : group_keys) out << k << ',';
    out << "count,mean_ami,max_ami,std_ami\n";
    for (const SummaryRow& row : rows) {
        for (const std::string& k : row.key) out << k << ',';
        out << row.count << ',' << fmt_double(row.mean_ami) << ',' << fmt_double(row.max_ami) << ','
            << fmt_double(row.std_ami) << '\n';
    }
    return out.str();
}

}  // namespace simfuse
