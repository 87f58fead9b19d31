#pragma once

#include "gwca/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>

namespace gwca {

/// Deterministic random source. Draws come from std::mt19937_64, whose
/// output sequence is fixed by the C++ standard; uniforms take the top 53
/// bits and normals use the Box-Muller transform, so the same seed yields
/// the same numbers with any conforming standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    /// Uniform integer in [lo, hi].
    std::size_t uniform_int(std::size_t lo, std::size_t hi);
    double normal();
    Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols);

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

enum class MixingKind { gaussian, identity };

MixingKind parse_mixing(std::string_view name);

struct SynthConfig {
    std::size_t pair_count = 100;
    std::size_t test_pair_count = 0;
    std::size_t min_nodes = 20;
    std::size_t max_nodes = 40;
    std::size_t d1 = 16;
    std::size_t d2 = 12;
    MixingKind mixing = MixingKind::gaussian;
    double noise = 0.0;
    double edge_density = 0.2;
    std::uint64_t seed = 7;

    /// Throws ConfigError describing the first invalid field.
    void validate() const;
};

/// Correlated cross-view pairs. Both views share node set, node order and
/// topology; view-2 features are (view-1 features) * mixing + noise * N(0, 1).
struct SyntheticSet {
    Matrix mixing;  ///< d1 x d2
    std::vector<GraphPair> train;
    std::vector<GraphPair> test;
};

SyntheticSet generate_pairs(const SynthConfig& cfg);

/// Writes one Graph JSON file per view plus `manifest.jsonl` (and
/// `test_manifest.jsonl` when there are test pairs) into `dir`.
/// Returns the number of graph files written.
std::size_t write_synthetic(const SyntheticSet& set, const std::filesystem::path& dir);

/// Connection rule for similarity graphs. Exactly one of the two is set.
struct EmbeddingGraphConfig {
    std::optional<double> threshold;   ///< edge iff cosine > threshold
    std::optional<std::size_t> top_m;  ///< edge iff either endpoint is in the other's top-m

    void validate() const;
};

/// Graph whose nodes are the embedding rows, weighted by positive cosine
/// similarity (clamped to 1). Features are the embeddings themselves.
Graph build_embedding_graph(const Matrix& embeddings, const EmbeddingGraphConfig& cfg);

}  // namespace gwca
