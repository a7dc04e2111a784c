#include "simfuse/io.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace simfuse {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr char kMagic[4] = {'S', 'F', 'M', 'X'};
constexpr std::uint32_t kVersion = 1;

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return in;
}

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::ifstream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("truncated matrix file");
}

json labels_to_json(const Labels& labels) {
    return json{{"assignments", labels.assignments}, {"n_clusters", labels.n_clusters}};
}

Labels labels_from_json(const json& j) {
    Labels out;
    out.assignments = j.at("assignments").get<std::vector<int>>();
    out.n_clusters = j.at("n_clusters").get<int>();
    return out;
}

}  // namespace

void save_matrix(const Eigen::MatrixXd& values, const std::vector<std::uint8_t>& present,
                 const std::string& path) {
    const auto rows = static_cast<std::uint64_t>(values.rows());
    const auto cols = static_cast<std::uint64_t>(values.cols());
    if (present.size() != rows) throw std::invalid_argument("save_matrix: presence length mismatch");

    std::ofstream out = open_out(path, std::ios::binary);
    out.write(kMagic, 4);
    write_pod(out, kVersion);
    write_pod(out, rows);
    write_pod(out, cols);
    std::vector<std::uint8_t> bitmap((rows + 7) / 8, 0);
    for (std::uint64_t i = 0; i < rows; ++i)
        if (present[i]) bitmap[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    out.write(reinterpret_cast<const char*>(bitmap.data()), static_cast<std::streamsize>(bitmap.size()));
    for (std::uint64_t i = 0; i < rows; ++i)
        for (std::uint64_t j = 0; j < cols; ++j) write_pod(out, values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    if (!out) throw std::runtime_error("write failed: " + path);
}

void load_matrix(const std::string& path, Eigen::MatrixXd& values,
                 std::vector<std::uint8_t>& present) {
    std::ifstream in = open_in(path, std::ios::binary);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("not a matrix file: " + path);
    std::uint32_t version = 0;
    read_pod(in, version);
    if (version != kVersion) throw std::runtime_error("unsupported matrix version in " + path);
    std::uint64_t rows = 0, cols = 0;
    read_pod(in, rows);
    read_pod(in, cols);

    std::vector<std::uint8_t> bitmap((rows + 7) / 8);
    in.read(reinterpret_cast<char*>(bitmap.data()), static_cast<std::streamsize>(bitmap.size()));
    if (!in) throw std::runtime_error("truncated matrix file: " + path);
    present.assign(rows, 0);
    for (std::uint64_t i = 0; i < rows; ++i)
        present[i] = (bitmap[i / 8] >> (i % 8)) & 1u;

    values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::uint64_t i = 0; i < rows; ++i)
        for (std::uint64_t j = 0; j < cols; ++j)
            read_pod(in, values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
}

void save_similarity(const SimilarityMatrix& m, const std::string& path) {
    save_matrix(m.values, m.present, path);
}

SimilarityMatrix load_similarity(const std::string& path, Orientation orientation) {
    SimilarityMatrix out;
    load_matrix(path, out.values, out.present);
    if (out.values.rows() != out.values.cols())
        throw std::runtime_error("similarity matrix must be square: " + path);
    out.orientation = orientation;
    return out;
}

void save_dataset(const Dataset& ds, const std::string& dir) {
    fs::create_directories(dir);
    json manifest;
    manifest["format_version"] = 1;
    manifest["problem"] = ds.problem;
    manifest["seed"] = ds.rng_seed;
    manifest["n"] = ds.n();
    manifest["params"] = {{"center_scale", ds.params.center_scale},
                          {"student_t_dof", ds.params.student_t_dof},
                          {"cat_n_categories", ds.params.cat_n_categories},
                          {"cat_informative_fraction", ds.params.cat_informative_fraction}};
    manifest["truth"] = labels_to_json(ds.truth);
    manifest["partial_mask"] = ds.partial_mask ? labels_to_json(*ds.partial_mask) : json(nullptr);

    json mods = json::array();
    for (std::size_t i = 0; i < ds.modalities.size(); ++i) {
        const ModalityData& md = ds.modalities[i];
        const std::string file = "modality_" + std::to_string(i) + ".sfm";
        save_matrix(md.features, md.present, (fs::path(dir) / file).string());
        mods.push_back({{"file", file},
                        {"categorical", md.categorical},
                        {"n_categories", md.n_categories},
                        {"labels", labels_to_json(md.labels)}});
    }
    manifest["modalities"] = mods;

    std::ofstream out = open_out((fs::path(dir) / "manifest.json").string());
    out << manifest.dump(2) << '\n';
}

Dataset load_dataset(const std::string& dir) {
    std::ifstream in = open_in((fs::path(dir) / "manifest.json").string());
    json manifest;
    in >> manifest;

    Dataset ds;
    ds.problem = manifest.at("problem").get<std::string>();
    ds.rng_seed = manifest.at("seed").get<std::uint64_t>();
    const json& p = manifest.at("params");
    ds.params.center_scale = p.at("center_scale").get<double>();
    ds.params.student_t_dof = p.at("student_t_dof").get<double>();
    ds.params.cat_n_categories = p.at("cat_n_categories").get<int>();
    ds.params.cat_informative_fraction = p.at("cat_informative_fraction").get<double>();
    ds.truth = labels_from_json(manifest.at("truth"));
    if (!manifest.at("partial_mask").is_null())
        ds.partial_mask = labels_from_json(manifest.at("partial_mask"));

    for (const json& mod : manifest.at("modalities")) {
        ModalityData md;
        load_matrix((fs::path(dir) / mod.at("file").get<std::string>()).string(), md.features,
                    md.present);
        md.categorical = mod.at("categorical").get<bool>();
        md.n_categories = mod.at("n_categories").get<int>();
        md.labels = labels_from_json(mod.at("labels"));
        ds.modalities.push_back(std::move(md));
    }
    return ds;
}

void save_graph(const Graph& g, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "n " << g.n_nodes << '\n';
    char buf[64];
    for (const Graph::Edge& e : g.edges) {
        std::snprintf(buf, sizeof(buf), "%.17g", e.w);
        out << e.u << ' ' << e.v << ' ' << buf << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

Graph load_graph(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string tag;
    int n = 0;
    if (!(in >> tag >> n) || tag != "n") throw std::runtime_error("bad graph header in " + path);
    std::vector<Graph::Edge> edges;
    int u, v;
    double w;
    while (in >> u >> v >> w) edges.push_back({u, v, w});
    return Graph::from_edges(n, std::move(edges));
}

void save_labels(const Labels& labels, const std::string& path) {
    std::ofstream out = open_out(path);
    for (int id : labels.assignments) out << id << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

Labels load_labels(const std::string& path) {
    std::ifstream in = open_in(path);
    std::vector<int> ids;
    int id;
    while (in >> id) ids.push_back(id);
    return Labels::from_assignments(std::move(ids));
}

std::string stats_to_json(const GraphStats& s) {
    json j;
    j["n_nodes"] = s.n_nodes;
    j["n_edges"] = s.n_edges;
    j["min_degree"] = s.min_degree;
    j["mean_degree"] = s.mean_degree;
    j["median_degree"] = s.median_degree;
    j["modularity_truth"] = s.modularity_truth;
    j["tpr_truth"] = s.tpr_truth;
    j["assortativity"] = s.assortativity.defined ? json(s.assortativity.value) : json(nullptr);
    j["mean_path_length"] = s.mean_path_length.defined ? json(s.mean_path_length.value) : json(nullptr);
    return j.dump(2);
}

void save_stats(const GraphStats& s, const std::string& path) {
    std::ofstream out = open_out(path);
    out << stats_to_json(s) << '\n';
}

}  // namespace simfuse
