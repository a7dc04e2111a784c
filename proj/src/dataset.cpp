#include "simfuse/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "simfuse/rng.hpp"

namespace simfuse {

int ModalityData::n_present() const {
    return static_cast<int>(std::count(present.begin(), present.end(), std::uint8_t{1}));
}

bool ModalityData::all_present() const {
    return std::all_of(present.begin(), present.end(), [](std::uint8_t p) { return p != 0; });
}

namespace {

Eigen::MatrixXd draw_centers(int k, int d, double scale, Rng& rng) {
    Eigen::MatrixXd centers(k, d);
    for (int c = 0; c < k; ++c)
        for (int j = 0; j < d; ++j) centers(c, j) = scale * rng.normal();
    return centers;
}

}  // namespace

ModalityData gen_gaussian(const Labels& y_i, int d, const GenParams& params, std::uint64_t seed) {
    if (d <= 0) throw std::invalid_argument("gen_gaussian: n_features must be positive");
    Rng rng(seed);
    const int n = y_i.n();
    Eigen::MatrixXd centers = draw_centers(y_i.n_clusters, d, params.center_scale, rng);
    ModalityData md;
    md.features.resize(n, d);
    for (int i = 0; i < n; ++i) {
        const int c = y_i.assignments[i];
        for (int j = 0; j < d; ++j) md.features(i, j) = centers(c, j) + rng.normal();
    }
    md.present.assign(n, 1);
    md.labels = y_i;
    return md;
}

ModalityData gen_student_t(const Labels& y_i, int d, const GenParams& params, std::uint64_t seed) {
    if (d <= 0) throw std::invalid_argument("gen_student_t: n_features must be positive");
    Rng rng(seed);
    const int n = y_i.n();
    Eigen::MatrixXd centers = draw_centers(y_i.n_clusters, d, params.center_scale, rng);
    ModalityData md;
    md.features.resize(n, d);
    for (int i = 0; i < n; ++i) {
        const int c = y_i.assignments[i];
        for (int j = 0; j < d; ++j)
            md.features(i, j) = centers(c, j) + rng.student_t(params.student_t_dof);
    }
    md.present.assign(n, 1);
    md.labels = y_i;
    return md;
}

SharedCategorical gen_shared_categorical(int d, const GenParams& params, std::uint64_t seed) {
    Rng rng(seed);
    SharedCategorical shared(d);
    const std::vector<double> alpha(params.cat_n_categories, 5.0);
    for (int j = 0; j < d; ++j) shared[j] = rng.dirichlet(alpha);
    return shared;
}

ModalityData gen_categorical(const Labels& y_i, int d, const GenParams& params, std::uint64_t seed,
                             const SharedCategorical* shared) {
    if (d <= 0) throw std::invalid_argument("gen_categorical: n_features must be positive");
    Rng rng(seed);
    const int n = y_i.n();
    const int k = y_i.n_clusters;
    const int q = params.cat_n_categories;
    const int n_inf = static_cast<int>(std::llround(params.cat_informative_fraction * d));

    // Informative features: one category distribution per cluster per feature.
    const std::vector<double> alpha_inf(q, 0.5);
    std::vector<std::vector<std::vector<double>>> inf_dists(n_inf);
    for (int j = 0; j < n_inf; ++j) {
        inf_dists[j].resize(k);
        for (int c = 0; c < k; ++c) inf_dists[j][c] = rng.dirichlet(alpha_inf);
    }

    // Uninformative features share one distribution across clusters.
    SharedCategorical own;
    const SharedCategorical* uninf = shared;
    if (uninf == nullptr) {
        const std::vector<double> alpha_uninf(q, 5.0);
        own.resize(d);
        for (int j = 0; j < d; ++j) own[j] = rng.dirichlet(alpha_uninf);
        uninf = &own;
    }
    if (static_cast<int>(uninf->size()) < d)
        throw std::invalid_argument("gen_categorical: shared distributions shorter than n_features");

    ModalityData md;
    md.features.resize(n, d);
    for (int i = 0; i < n; ++i) {
        const int c = y_i.assignments[i];
        for (int j = 0; j < d; ++j) {
            const std::vector<double>& dist = j < n_inf ? inf_dists[j][c] : (*uninf)[j];
            md.features(i, j) = static_cast<double>(rng.categorical(dist));
        }
    }
    md.present.assign(n, 1);
    md.labels = y_i;
    md.categorical = true;
    md.n_categories = q;
    return md;
}

Dataset mask_random(const Dataset& ds, double fraction, std::uint64_t seed) {
    if (fraction < 0.0 || fraction > 1.0)
        throw std::invalid_argument("mask_random: fraction must lie in [0, 1]");
    if (ds.partial_mask) throw std::invalid_argument("mask_random: dataset already masked");
    Rng rng(seed);
    Dataset out = ds;
    const int n = ds.n();
    const int m = ds.n_modalities();
    const int n_mask = static_cast<int>(fraction * n);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    std::vector<int> mask_assign(n, m);  // m == "complete"
    for (int t = 0; t < n_mask; ++t) {
        const int i = order[t];
        const int v = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(m)));
        out.modalities[v].present[i] = 0;
        mask_assign[i] = v;
    }
    out.partial_mask = Labels::from_assignments(mask_assign);
    return out;
}

Dataset mask_cluster(const Dataset& ds, double fraction, std::uint64_t seed) {
    if (fraction < 0.0 || fraction > 1.0)
        throw std::invalid_argument("mask_cluster: fraction must lie in [0, 1]");
    if (ds.partial_mask) throw std::invalid_argument("mask_cluster: dataset already masked");
    Rng rng(seed);
    Dataset out = ds;
    const int m = ds.n_modalities();
    const int k = ds.truth.n_clusters;

    Labels groups;
    if (m < k)
        groups = merge_labels(ds.truth, m, derive_seed(seed, 1));
    else if (m > k)
        groups = split_labels(ds.truth, m, derive_seed(seed, 1));
    else
        groups = ds.truth;

    std::vector<int> mask_assign(ds.n(), m);
    const std::vector<std::vector<int>> groups_members = cluster_members(groups);
    for (int g = 0; g < m; ++g) {
        std::vector<int> members = groups_members[g];
        const int n_mask = static_cast<int>(fraction * members.size());
        rng.shuffle(members);
        for (int t = 0; t < n_mask; ++t) {
            out.modalities[g].present[members[t]] = 0;
            mask_assign[members[t]] = g;
        }
    }
    out.partial_mask = Labels::from_assignments(mask_assign);
    return out;
}

ModalityData gen_modality(const Labels& truth, const ModalitySpec& spec, const GenParams& params,
                          std::uint64_t label_seed, std::uint64_t data_seed,
                          const SharedCategorical* shared) {
    Labels y_i;
    switch (spec.cluster_transform) {
        case ClusterTransform::Unchanged: y_i = truth; break;
        case ClusterTransform::Merged: y_i = merge_labels(truth, spec.transform_target, label_seed); break;
        case ClusterTransform::Split: y_i = split_labels(truth, spec.transform_target, label_seed); break;
        case ClusterTransform::Random: y_i = random_labels(truth.n(), spec.transform_target, label_seed); break;
    }
    switch (spec.distribution) {
        case Distribution::Gaussian: return gen_gaussian(y_i, spec.n_features, params, data_seed);
        case Distribution::StudentT: return gen_student_t(y_i, spec.n_features, params, data_seed);
        case Distribution::Categorical:
            return gen_categorical(y_i, spec.n_features, params, data_seed, shared);
    }
    throw std::logic_error("gen_modality: unknown distribution");
}

namespace {

struct ProblemRow {
    const char* name;
    // Per modality: distribution code ('G', 'S', 'C') and transform code (0..3).
    char dist[3];
    int transform[3];
};

// The fifteen benchmark problems, three modalities each.
const ProblemRow kRegistry[] = {
    {"Cat", {'C', 'C', 'C'}, {0, 0, 0}},
    {"Easy", {'G', 'G', 'G'}, {0, 0, 0}},
    {"Single Merged", {'G', 'G', 'G'}, {0, 0, 1}},
    {"Single Noisy", {'G', 'G', 'S'}, {0, 0, 0}},
    {"Split", {'G', 'G', 'G'}, {2, 2, 2}},
    {"Mixed Normal", {'G', 'G', 'G'}, {1, 1, 2}},
    {"Merged", {'G', 'G', 'G'}, {1, 1, 1}},
    {"Mixed All", {'C', 'G', 'S'}, {1, 1, 2}},
    {"Noisy", {'S', 'S', 'S'}, {0, 0, 0}},
    {"1Rand", {'G', 'G', 'G'}, {0, 0, 3}},
    {"Mixed Noisy", {'S', 'S', 'S'}, {1, 1, 2}},
    {"Mixed 1Rand", {'G', 'G', 'G'}, {1, 2, 3}},
    {"Noisy 1Rand", {'S', 'S', 'S'}, {0, 0, 3}},
    {"Mixed Noisy 1Rand", {'S', 'S', 'S'}, {1, 2, 3}},
    {"2Rand", {'G', 'G', 'G'}, {0, 3, 3}},
};

constexpr int kMergedTarget = 5;
constexpr int kSplitTarget = 20;
constexpr int kRandomTarget = 10;

const ProblemRow& find_problem(const std::string& name) {
    for (const ProblemRow& row : kRegistry)
        if (name == row.name) return row;
    throw std::invalid_argument("unknown problem: " + name);
}

}  // namespace

const std::vector<std::string>& problem_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const ProblemRow& row : kRegistry) v.emplace_back(row.name);
        return v;
    }();
    return names;
}

std::vector<ModalitySpec> problem_specs(const std::string& name, int n_features) {
    const ProblemRow& row = find_problem(name);
    std::vector<ModalitySpec> specs(3);
    for (int i = 0; i < 3; ++i) {
        ModalitySpec& s = specs[i];
        switch (row.dist[i]) {
            case 'G': s.distribution = Distribution::Gaussian; break;
            case 'S': s.distribution = Distribution::StudentT; break;
            case 'C': s.distribution = Distribution::Categorical; break;
        }
        switch (row.transform[i]) {
            case 0: s.cluster_transform = ClusterTransform::Unchanged; s.transform_target = 0; break;
            case 1: s.cluster_transform = ClusterTransform::Merged; s.transform_target = kMergedTarget; break;
            case 2: s.cluster_transform = ClusterTransform::Split; s.transform_target = kSplitTarget; break;
            case 3: s.cluster_transform = ClusterTransform::Random; s.transform_target = kRandomTarget; break;
        }
        s.n_features = n_features;
    }
    return specs;
}

Dataset build_problem(const std::string& name, int n, std::uint64_t seed, int n_clusters,
                      int n_features, const GenParams& params) {
    const std::vector<ModalitySpec> specs = problem_specs(name, n_features);

    Dataset ds;
    ds.truth = gen_labels(n, n_clusters, derive_seed(seed, 0));
    ds.rng_seed = seed;
    ds.problem = name;
    ds.params = params;

    const bool any_cat = std::any_of(specs.begin(), specs.end(), [](const ModalitySpec& s) {
        return s.distribution == Distribution::Categorical;
    });
    SharedCategorical shared;
    if (any_cat) shared = gen_shared_categorical(n_features, params, derive_seed(seed, 300));

    for (std::size_t i = 0; i < specs.size(); ++i) {
        ds.modalities.push_back(gen_modality(ds.truth, specs[i], params,
                                             derive_seed(seed, 100 + i), derive_seed(seed, 200 + i),
                                             any_cat ? &shared : nullptr));
    }
    return ds;
}

}  // namespace simfuse
