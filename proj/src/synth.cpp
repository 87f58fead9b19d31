#include "gwca/synth.hpp"

#include "gwca/error.hpp"
#include "gwca/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

namespace gwca {

std::size_t Rng::uniform_int(std::size_t lo, std::size_t hi) {
    const auto span = static_cast<double>(hi - lo + 1);
    const auto offset = static_cast<std::size_t>(uniform() * span);
    return lo + std::min(offset, hi - lo);
}

double Rng::normal() {
    if (spare_) {
        const double v = *spare_;
        spare_.reset();
        return v;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    return radius * std::cos(angle);
}

Matrix Rng::normal_matrix(Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal();
    }
    return m;
}

MixingKind parse_mixing(std::string_view name) {
    if (name == "gaussian") return MixingKind::gaussian;
    if (name == "identity") return MixingKind::identity;
    throw ConfigError("unknown mixing '" + std::string(name) + "' (expected gaussian or identity)");
}

void SynthConfig::validate() const {
    if (min_nodes < 1 || max_nodes < min_nodes) throw ConfigError("node range must satisfy 1 <= min <= max");
    if (d1 < 1 || d2 < 1) throw ConfigError("feature dimensions must be at least 1");
    if (!(noise >= 0.0) || !std::isfinite(noise)) throw ConfigError("noise must be a finite value >= 0");
    if (!(edge_density > 0.0 && edge_density <= 1.0)) throw ConfigError("edge density must lie in (0, 1]");
    if (mixing == MixingKind::identity && d1 != d2) throw ConfigError("identity mixing needs d1 == d2");
}

namespace {

Matrix random_adjacency(Rng& rng, std::size_t n, double density) {
    const auto nn = static_cast<Eigen::Index>(n);
    Matrix a = Matrix::Zero(nn, nn);
    for (Eigen::Index i = 0; i < nn; ++i) {
        for (Eigen::Index j = i + 1; j < nn; ++j) {
            if (rng.uniform() < density) {
                const double w = 1.0 - rng.uniform();
                a(i, j) = w;
                a(j, i) = w;
            }
        }
    }
    return a;
}

GraphPair random_pair(Rng& rng, const SynthConfig& cfg, const Matrix& mixing) {
    const std::size_t n = rng.uniform_int(cfg.min_nodes, cfg.max_nodes);
    Matrix a = random_adjacency(rng, n, cfg.edge_density);
    Matrix x1 = rng.normal_matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cfg.d1));
    Matrix x2 = x1 * mixing;
    if (cfg.noise > 0.0) x2 += cfg.noise * rng.normal_matrix(x2.rows(), x2.cols());
    return {Graph(a, std::move(x1)), Graph(a, std::move(x2))};
}

}  // namespace

SyntheticSet generate_pairs(const SynthConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    SyntheticSet set;
    const auto d1 = static_cast<Eigen::Index>(cfg.d1);
    const auto d2 = static_cast<Eigen::Index>(cfg.d2);
    if (cfg.mixing == MixingKind::identity) {
        set.mixing = Matrix::Identity(d1, d2);
    } else {
        set.mixing = rng.normal_matrix(d1, d2) / std::sqrt(static_cast<double>(cfg.d1));
    }
    set.train.reserve(cfg.pair_count);
    for (std::size_t m = 0; m < cfg.pair_count; ++m) set.train.push_back(random_pair(rng, cfg, set.mixing));
    set.test.reserve(cfg.test_pair_count);
    for (std::size_t m = 0; m < cfg.test_pair_count; ++m) set.test.push_back(random_pair(rng, cfg, set.mixing));
    return set;
}

namespace {

std::size_t write_split(const std::vector<GraphPair>& pairs, const std::filesystem::path& dir,
                        const std::string& prefix, const std::string& manifest_name) {
    std::vector<ManifestEntry> entries;
    entries.reserve(pairs.size());
    char name[64];
    for (std::size_t m = 0; m < pairs.size(); ++m) {
        std::snprintf(name, sizeof name, "%s-%05zu", prefix.c_str(), m);
        ManifestEntry e{name, std::string(name) + "_v1.json", std::string(name) + "_v2.json"};
        write_graph_file(dir / e.view1, pairs[m].first);
        write_graph_file(dir / e.view2, pairs[m].second);
        entries.push_back(std::move(e));
    }
    write_manifest(dir / manifest_name, entries);
    return 2 * pairs.size();
}

}  // namespace

std::size_t write_synthetic(const SyntheticSet& set, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::size_t files = write_split(set.train, dir, "train", "manifest.jsonl");
    if (!set.test.empty()) files += write_split(set.test, dir, "test", "test_manifest.jsonl");
    return files;
}

void EmbeddingGraphConfig::validate() const {
    if (threshold.has_value() == top_m.has_value()) {
        throw ConfigError("set exactly one of a similarity threshold or a top-m neighbour count");
    }
    if (threshold && !(*threshold >= -1.0 && *threshold <= 1.0)) {
        throw ConfigError("similarity threshold must lie in [-1, 1]");
    }
    if (top_m && *top_m < 1) throw ConfigError("top-m must be at least 1");
}

Graph build_embedding_graph(const Matrix& embeddings, const EmbeddingGraphConfig& cfg) {
    cfg.validate();
    const auto n = embeddings.rows();
    if (n < 1 || embeddings.cols() < 1) throw ConfigError("embedding matrix is empty");
    if (!embeddings.allFinite()) throw ConfigError("embedding matrix has non-finite entries");
    Matrix unit = embeddings;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double norm = unit.row(i).norm();
        if (norm == 0.0) throw ConfigError("embedding row " + std::to_string(i) + " has zero norm");
        unit.row(i) /= norm;
    }
    const Matrix sim = unit * unit.transpose();

    Matrix a = Matrix::Zero(n, n);
    auto connect = [&](Eigen::Index i, Eigen::Index j) {
        const double s = sim(std::min(i, j), std::max(i, j));
        if (s <= 0.0) return;
        const double w = std::min(s, 1.0);
        a(i, j) = w;
        a(j, i) = w;
    };
    if (cfg.threshold) {
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = i + 1; j < n; ++j) {
                if (sim(i, j) > *cfg.threshold) connect(i, j);
            }
        }
    } else {
        for (Eigen::Index i = 0; i < n; ++i) {
            std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
            std::iota(order.begin(), order.end(), Eigen::Index{0});
            std::erase(order, i);
            std::stable_sort(order.begin(), order.end(),
                             [&](Eigen::Index x, Eigen::Index y) { return sim(i, x) > sim(i, y); });
            const std::size_t m = std::min(*cfg.top_m, order.size());
            for (std::size_t t = 0; t < m; ++t) connect(i, order[t]);
        }
    }
    return Graph(std::move(a), embeddings);
}

}  // namespace gwca
