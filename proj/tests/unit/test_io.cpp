#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "simfuse/dataset.hpp"
#include "simfuse/graph.hpp"
#include "simfuse/io.hpp"
#include "simfuse/labels.hpp"
#include "simfuse/rng.hpp"
#include "simfuse/similarity.hpp"

using namespace simfuse;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;

    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("simfuse_io_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }

    std::string file(const std::string& name) const { return (path / name).string(); }
};

// Equal entrywise, treating NaN == NaN as true.
bool same_values(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            const bool both_nan = std::isnan(a(i, j)) && std::isnan(b(i, j));
            if (!both_nan && a(i, j) != b(i, j)) return false;
        }
    return true;
}

bool same_labels(const Labels& a, const Labels& b) {
    return a.n_clusters == b.n_clusters && a.assignments == b.assignments;
}

}  // namespace

TEST_SUITE("io") {
    TEST_CASE("matrix roundtrip preserves values, NaN and a multi-byte presence bitmap") {
        TempDir tmp;
        const int n = 13, d = 4;  // 13 rows forces a two-byte bitmap
        Rng rng(3);
        Eigen::MatrixXd values(n, d);
        std::vector<std::uint8_t> present(n, 1);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < d; ++j) values(i, j) = rng.normal();
        for (int i : {2, 8, 12}) {
            present[i] = 0;
            values.row(i).setConstant(std::numeric_limits<double>::quiet_NaN());
        }
        values(0, 0) = 1.0 / 3.0;  // not exactly representable in decimal

        save_matrix(values, present, tmp.file("m.sfm"));
        Eigen::MatrixXd loaded;
        std::vector<std::uint8_t> loaded_present;
        load_matrix(tmp.file("m.sfm"), loaded, loaded_present);

        CHECK(same_values(values, loaded));
        CHECK(loaded_present == present);
    }

    TEST_CASE("matrix container validates its input") {
        TempDir tmp;
        const Eigen::MatrixXd values = Eigen::MatrixXd::Zero(3, 2);

        CHECK_THROWS_AS(save_matrix(values, std::vector<std::uint8_t>(2, 1), tmp.file("bad.sfm")),
                        std::invalid_argument);

        {
            std::ofstream out(tmp.file("garbage.sfm"));
            out << "this is not a matrix\n";
        }
        Eigen::MatrixXd loaded;
        std::vector<std::uint8_t> present;
        CHECK_THROWS_AS(load_matrix(tmp.file("garbage.sfm"), loaded, present), std::runtime_error);

        save_matrix(values, std::vector<std::uint8_t>(3, 1), tmp.file("whole.sfm"));
        const auto full_size = fs::file_size(tmp.file("whole.sfm"));
        fs::copy_file(tmp.file("whole.sfm"), tmp.file("cut.sfm"));
        fs::resize_file(tmp.file("cut.sfm"), full_size - 9);
        CHECK_THROWS_AS(load_matrix(tmp.file("cut.sfm"), loaded, present), std::runtime_error);

        CHECK_THROWS_AS(load_matrix(tmp.file("no_such.sfm"), loaded, present), std::runtime_error);
    }

    TEST_CASE("similarity roundtrip keeps presence and requires a square matrix") {
        TempDir tmp;
        SimilarityMatrix m = SimilarityMatrix::zeros(5, Orientation::Affinity);
        Rng rng(9);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) m.values(i, j) = rng.uniform();
        m.present[3] = 0;

        save_similarity(m, tmp.file("s.sfm"));
        const SimilarityMatrix loaded = load_similarity(tmp.file("s.sfm"), Orientation::Affinity);
        CHECK(loaded.orientation == Orientation::Affinity);
        CHECK(same_values(m.values, loaded.values));
        CHECK(loaded.present == m.present);

        save_matrix(Eigen::MatrixXd::Zero(2, 3), std::vector<std::uint8_t>(2, 1),
                    tmp.file("rect.sfm"));
        CHECK_THROWS_AS(load_similarity(tmp.file("rect.sfm"), Orientation::Distance),
                        std::runtime_error);
    }

    TEST_CASE("dataset roundtrip preserves every field") {
        TempDir tmp;
        GenParams params;
        params.center_scale = 0.8;
        params.cat_informative_fraction = 0.4;
        const Dataset ds = build_problem("Mixed All", 40, 17, 10, 6, params);
        const Dataset masked = mask_random(ds, 0.25, 5);
        REQUIRE(masked.partial_mask.has_value());

        save_dataset(masked, tmp.file("ds"));
        const Dataset loaded = load_dataset(tmp.file("ds"));

        CHECK(loaded.problem == masked.problem);
        CHECK(loaded.rng_seed == masked.rng_seed);
        CHECK(loaded.params.center_scale == masked.params.center_scale);
        CHECK(loaded.params.student_t_dof == masked.params.student_t_dof);
        CHECK(loaded.params.cat_n_categories == masked.params.cat_n_categories);
        CHECK(loaded.params.cat_informative_fraction == masked.params.cat_informative_fraction);
        CHECK(same_labels(loaded.truth, masked.truth));
        REQUIRE(loaded.partial_mask.has_value());
        CHECK(same_labels(*loaded.partial_mask, *masked.partial_mask));

        REQUIRE(loaded.n_modalities() == masked.n_modalities());
        for (int i = 0; i < masked.n_modalities(); ++i) {
            const ModalityData& a = masked.modalities[i];
            const ModalityData& b = loaded.modalities[i];
            CHECK(b.categorical == a.categorical);
            CHECK(b.n_categories == a.n_categories);
            CHECK(same_labels(b.labels, a.labels));
            CHECK(b.present == a.present);
            CHECK(same_values(b.features, a.features));
        }
    }

    TEST_CASE("dataset without a partial mask roundtrips to a null mask") {
        TempDir tmp;
        const Dataset ds = build_problem("Easy", 30, 2, 3, 5);
        REQUIRE(!ds.partial_mask.has_value());
        save_dataset(ds, tmp.file("ds"));
        const Dataset loaded = load_dataset(tmp.file("ds"));
        CHECK(!loaded.partial_mask.has_value());
        CHECK(same_labels(loaded.truth, ds.truth));
    }

    TEST_CASE("graph roundtrip is exact, including 17-digit weights") {
        TempDir tmp;
        const Graph g = Graph::from_edges(
            5, {{0, 1, 1.0 / 3.0}, {1, 2, 0.1}, {0, 4, std::exp(-2.0)}, {2, 3, 1.0}});
        save_graph(g, tmp.file("g.txt"));
        const Graph loaded = load_graph(tmp.file("g.txt"));

        CHECK(loaded.n_nodes == g.n_nodes);
        REQUIRE(loaded.edges.size() == g.edges.size());
        for (std::size_t i = 0; i < g.edges.size(); ++i) {
            CHECK(loaded.edges[i].u == g.edges[i].u);
            CHECK(loaded.edges[i].v == g.edges[i].v);
            CHECK(loaded.edges[i].w == g.edges[i].w);
        }

        {
            std::ofstream out(tmp.file("bad.txt"));
            out << "nodes 5\n0 1 1.0\n";
        }
        CHECK_THROWS_AS(load_graph(tmp.file("bad.txt")), std::runtime_error);
    }

    TEST_CASE("labels roundtrip") {
        TempDir tmp;
        Labels y;
        y.assignments = {0, 2, 1, 2, 0, 1, 1};
        y.n_clusters = 3;
        save_labels(y, tmp.file("y.txt"));
        const Labels loaded = load_labels(tmp.file("y.txt"));
        CHECK(same_labels(loaded, y));
    }

    TEST_CASE("stats JSON carries values and nulls for undefined fields") {
        const Graph two_triangles = Graph::from_edges(
            6, {{0, 1, 1}, {0, 2, 1}, {1, 2, 1}, {3, 4, 1}, {3, 5, 1}, {4, 5, 1}});
        Labels truth;
        truth.assignments = {0, 0, 0, 1, 1, 1};
        truth.n_clusters = 2;

        const GraphStats s = compute_stats(two_triangles, truth, 1.0);
        const nlohmann::json j = nlohmann::json::parse(stats_to_json(s));
        CHECK(j.at("n_nodes").get<int>() == 6);
        CHECK(j.at("n_edges").get<int>() == 6);
        CHECK(j.at("min_degree").get<int>() == 2);
        CHECK(j.at("mean_degree").get<double>() == doctest::Approx(2.0));
        CHECK(j.at("median_degree").get<double>() == doctest::Approx(2.0));
        CHECK(j.at("modularity_truth").get<double>() == doctest::Approx(0.5));
        CHECK(j.at("tpr_truth").get<double>() == doctest::Approx(1.0));
        CHECK(j.at("assortativity").is_null());  // all degrees equal
        CHECK(j.at("mean_path_length").get<double>() == doctest::Approx(1.0));

        // Star graph: assortativity defined (-1), disconnected pair case above
        // already covers the null path.
        const Graph star = Graph::from_edges(4, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}});
        Labels one;
        one.assignments = {0, 0, 0, 0};
        one.n_clusters = 1;
        const nlohmann::json js = nlohmann::json::parse(stats_to_json(compute_stats(star, one, 1.0)));
        CHECK(js.at("assortativity").get<double>() == doctest::Approx(-1.0));

        TempDir tmp;
        save_stats(s, tmp.file("stats.json"));
        std::ifstream in(tmp.file("stats.json"));
        nlohmann::json reread;
        in >> reread;
        CHECK(reread == j);
    }
}
