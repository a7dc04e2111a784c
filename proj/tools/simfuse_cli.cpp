#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "simfuse/bench.hpp"
#include "simfuse/cluster.hpp"
#include "simfuse/dataset.hpp"
#include "simfuse/graph.hpp"
#include "simfuse/integrate.hpp"
#include "simfuse/io.hpp"
#include "simfuse/metrics.hpp"
#include "simfuse/rng.hpp"

namespace {

using namespace simfuse;

int cmd_generate(const std::string& problem, int n, int clusters, int features,
                 std::uint64_t seed, double center_scale, const std::string& partial,
                 double fraction, const std::string& out_dir) {
    GenParams params;
    params.center_scale = center_scale;
    Dataset ds = build_problem(problem, n, seed, clusters, features, params);
    if (partial == "random")
        ds = mask_random(ds, fraction, derive_seed(seed, 400));
    else if (partial == "cluster")
        ds = mask_cluster(ds, fraction, derive_seed(seed, 400));
    else if (!partial.empty())
        throw std::invalid_argument("--partial must be random or cluster");
    save_dataset(ds, out_dir);
    std::cout << "wrote " << out_dir << " (n=" << ds.n() << ", m=" << ds.n_modalities() << ")\n";
    return 0;
}

int cmd_fuse(const std::string& dataset_dir, const std::string& method_name,
             std::string policy_name, int k, double mu, double sigma, int snf_iters,
             double snf_tol, const std::string& out_prefix) {
    const Dataset ds = load_dataset(dataset_dir);
    const Method method = method_from_string(method_name);
    if (policy_name.empty())
        policy_name = ds.partial_mask ? policy_to_string(partial_policies(method)[0]) : "none";
    const PartialPolicy policy = policy_from_string(policy_name);

    FusionParams params;
    params.kernel.k_neighbors = k;
    params.kernel.mu = mu;
    params.threshold_sigma = sigma;
    params.snf_max_iters = snf_iters;
    params.snf_tol = snf_tol;

    const FuseResult res = fuse_modalities(ds, method, policy, params);
    const Graph graph = knn_graph(res.fused, k);

    save_similarity(res.fused, out_prefix + ".sfm");
    save_graph(graph, out_prefix + "_graph.txt");

    nlohmann::json meta;
    meta["method"] = method_name;
    meta["policy"] = policy_name;
    meta["orientation"] = res.fused.orientation == Orientation::Distance ? "distance" : "affinity";
    meta["k_neighbors"] = k;
    meta["mu"] = mu;
    meta["threshold_sigma"] = sigma;
    if (method == Method::Snf) {
        meta["snf_converged"] = res.snf_converged;
        meta["snf_iterations"] = res.snf_iterations;
    }
    std::ofstream metaf(out_prefix + "_meta.json");
    if (!metaf) throw std::runtime_error("cannot write " + out_prefix + "_meta.json");
    metaf << meta.dump(2) << '\n';

    std::cout << "wrote " << out_prefix << ".sfm, " << out_prefix << "_graph.txt ("
              << graph.n_edges() << " edges)\n";
    return 0;
}

int cmd_stats(const std::string& graph_path, const std::string& labels_path, double gamma,
              const std::string& out_path) {
    const Graph g = load_graph(graph_path);
    const Labels y = load_labels(labels_path);
    const GraphStats s = compute_stats(g, y, gamma);
    const std::string text = stats_to_json(s);
    if (out_path.empty()) {
        std::cout << text << '\n';
    } else {
        save_stats(s, out_path);
        std::cout << "wrote " << out_path << '\n';
    }
    return 0;
}

int cmd_cluster(const std::string& graph_path, const std::string& algorithm, double gamma,
                bool fixed_gamma, int k, std::uint64_t seed, int restarts,
                const std::string& out_path) {
    const Graph g = load_graph(graph_path);
    ClusterParams params;
    params.seed = seed;
    params.n_restarts = restarts;

    Labels labels;
    if (algorithm == "leiden") {
        if (fixed_gamma) {
            labels = leiden(g, gamma, seed);
            std::printf("gamma %.17g clusters %d\n", gamma, labels.n_clusters);
        } else {
            const ResolutionResult rr = select_resolution(g, params);
            labels = rr.labels;
            std::printf("selected gamma %.17g clusters %d\n", rr.gamma, labels.n_clusters);
        }
    } else if (algorithm == "spectral") {
        labels = spectral_rw(g, k, params);
        std::printf("clusters %d\n", labels.n_clusters);
    } else {
        throw std::invalid_argument("--algorithm must be leiden or spectral");
    }
    save_labels(labels, out_path);
    std::cout << "wrote " << out_path << '\n';
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& output_override,
            std::uint64_t seed_override, bool seed_set, int instances_override, bool full_scale,
            int threads_override) {
    std::string text = "{}";
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw std::invalid_argument("cannot open config: " + config_path);
        std::stringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    ExperimentConfig cfg = config_from_json_text(text);
    if (!output_override.empty()) cfg.output_path = output_override;
    if (seed_set) cfg.base_seed = seed_override;
    if (instances_override > 0) cfg.n_instances = instances_override;
    if (threads_override > 0) cfg.n_threads = threads_override;
    if (full_scale) {
        cfg.n_entities = 2500;
        cfg.n_features = 50;
        cfg.n_instances = 20;
        cfg.fusion.kernel.k_neighbors = 25;
    }
    cfg.validate();

    const std::vector<ExperimentRecord> records = run_experiment(cfg);
    std::cout << "wrote " << records.size() << " records to " << cfg.output_path << '\n';
    return 0;
}

int cmd_summarize(const std::string& records_path, const std::string& by,
                  const std::string& out_path) {
    const std::vector<ExperimentRecord> records = read_records(records_path);
    std::vector<std::string> keys;
    std::string cur;
    for (char c : by) {
        if (c == ',') {
            if (!cur.empty()) keys.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) keys.push_back(cur);
    if (keys.empty()) throw std::invalid_argument("--by needs at least one key");

    const std::string table = summary_to_table(summarize(records, keys), keys);
    if (out_path.empty()) {
        std::cout << table;
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        out << table;
        std::cout << "wrote " << out_path << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simfuse: multi-modal similarity integration experiments"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Generate a synthetic multi-modal dataset");
    std::string gen_problem = "Easy", gen_partial, gen_out;
    int gen_n = 500, gen_clusters = 10, gen_features = 30;
    std::uint64_t gen_seed = 20240101;
    double gen_center = 0.35, gen_fraction = 0.0;
    gen->add_option("--problem", gen_problem, "Problem name from the registry");
    gen->add_option("--n", gen_n, "Number of entities");
    gen->add_option("--clusters", gen_clusters, "Ground-truth cluster count");
    gen->add_option("--features", gen_features, "Features per modality");
    gen->add_option("--seed", gen_seed, "Base RNG seed");
    gen->add_option("--center-scale", gen_center, "Cluster-center spread");
    gen->add_option("--partial", gen_partial, "Partial-data mode: random or cluster");
    gen->add_option("--fraction", gen_fraction, "Fraction of entities to mask");
    gen->add_option("--out", gen_out, "Output directory")->required();

    // fuse
    auto* fuse = app.add_subcommand("fuse", "Fuse a dataset into one similarity matrix and KNN graph");
    std::string fuse_dataset, fuse_method = "mean", fuse_policy, fuse_out;
    int fuse_k = 15, fuse_snf_iters = 20;
    double fuse_mu = 0.5, fuse_sigma = 1.0, fuse_snf_tol = 1e-6;
    fuse->add_option("--dataset", fuse_dataset, "Dataset directory")->required();
    fuse->add_option("--method", fuse_method, "concat | mean | extreme | snf | nemo");
    fuse->add_option("--policy", fuse_policy,
                     "none | impute_max | ignore_nan | feature_mean | nemo_shared | extreme_shared");
    fuse->add_option("--k", fuse_k, "KNN neighborhood size");
    fuse->add_option("--mu", fuse_mu, "Kernel bandwidth");
    fuse->add_option("--sigma", fuse_sigma, "Extreme-mean threshold");
    fuse->add_option("--snf-iters", fuse_snf_iters, "Max SNF diffusion iterations");
    fuse->add_option("--snf-tol", fuse_snf_tol, "SNF convergence tolerance");
    fuse->add_option("--out", fuse_out, "Output prefix")->required();

    // stats
    auto* stats = app.add_subcommand("stats", "Network statistics of a graph");
    std::string stats_graph, stats_labels, stats_out;
    double stats_gamma = 1.0;
    stats->add_option("--graph", stats_graph, "Edge-list file")->required();
    stats->add_option("--labels", stats_labels, "Ground-truth labels file")->required();
    stats->add_option("--gamma", stats_gamma, "Modularity resolution");
    stats->add_option("--out", stats_out, "Output JSON path (stdout when omitted)");

    // cluster
    auto* clus = app.add_subcommand("cluster", "Community detection on a graph");
    std::string clus_graph, clus_alg = "leiden", clus_out;
    double clus_gamma = 1.0;
    int clus_k = 10, clus_restarts = 10;
    std::uint64_t clus_seed = 20240101;
    clus->add_option("--graph", clus_graph, "Edge-list file")->required();
    clus->add_option("--algorithm", clus_alg, "leiden | spectral");
    auto* gopt = clus->add_option("--gamma", clus_gamma, "Fixed leiden resolution (default: consensus sweep)");
    clus->add_option("--k", clus_k, "Cluster count for spectral");
    clus->add_option("--seed", clus_seed, "RNG seed");
    clus->add_option("--restarts", clus_restarts, "K-means restarts");
    clus->add_option("--out", clus_out, "Output labels path")->required();

    // run
    auto* run = app.add_subcommand("run", "Run a full experiment from a config file");
    std::string run_config, run_output;
    std::uint64_t run_seed = 0;
    bool run_full = false;
    int run_instances = 0, run_threads = 0;
    run->add_option("--config", run_config, "JSON config path (defaults apply when omitted)");
    auto* sopt = run->add_option("--seed", run_seed, "Override base seed");
    run->add_option("--output", run_output, "Override output path");
    run->add_option("--instances", run_instances, "Override instance count");
    run->add_option("--threads", run_threads, "Override worker count");
    run->add_flag("--full-scale", run_full, "Use the full benchmark scale: n=2500, d=50, 20 instances, K=25");

    // summarize
    auto* summ = app.add_subcommand("summarize", "Aggregate a records file into a summary table");
    std::string summ_records, summ_by = "problem,method,clusterer", summ_out;
    summ->add_option("--records", summ_records, "Records CSV path")->required();
    summ->add_option("--by", summ_by, "Comma-separated group keys");
    summ->add_option("--out", summ_out, "Output path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (gen->parsed())
            return cmd_generate(gen_problem, gen_n, gen_clusters, gen_features, gen_seed,
                                gen_center, gen_partial, gen_fraction, gen_out);
        if (fuse->parsed())
            return cmd_fuse(fuse_dataset, fuse_method, fuse_policy, fuse_k, fuse_mu, fuse_sigma,
                            fuse_snf_iters, fuse_snf_tol, fuse_out);
        if (stats->parsed()) return cmd_stats(stats_graph, stats_labels, stats_gamma, stats_out);
        if (clus->parsed())
            return cmd_cluster(clus_graph, clus_alg, clus_gamma, gopt->count() > 0, clus_k,
                               clus_seed, clus_restarts, clus_out);
        if (run->parsed())
            return cmd_run(run_config, run_output, run_seed, sopt->count() > 0, run_instances,
                           run_full, run_threads);
        if (summ->parsed()) return cmd_summarize(summ_records, summ_by, summ_out);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
