#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <utility>
#include <vector>

namespace gwca {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Undirected weighted graph with one feature row per node.
///
/// Instances are validated on construction and immutable afterwards:
/// the adjacency is symmetric (asymmetry up to 1e-12 is symmetrized,
/// anything larger is rejected), nonnegative, with an exactly zero
/// diagonal, and the feature matrix has one row per node.
class Graph {
public:
    Graph(Matrix adjacency, Matrix features);

    std::size_t size() const noexcept { return static_cast<std::size_t>(adjacency_.rows()); }
    std::size_t feature_dim() const noexcept { return static_cast<std::size_t>(features_.cols()); }

    const Matrix& adjacency() const noexcept { return adjacency_; }
    const Matrix& features() const noexcept { return features_; }

    /// Returns a copy whose node features are replaced.
    Graph with_features(Matrix features) const;

private:
    Matrix adjacency_;
    Matrix features_;
};

struct Laplacian {
    Matrix matrix;
    bool normalized = true;
};

inline constexpr double kSymmetryTolerance = 1e-12;

/// D - A, or I - D^{-1/2} A D^{-1/2} when `normalized` is set.
/// Isolated nodes map to 0 under D^{-1/2}, which leaves identity rows.
Laplacian build_laplacian(const Graph& g, bool normalized = true);

/// [L^0, L^1, ..., L^k_max].
std::vector<Matrix> laplacian_powers(const Laplacian& l, std::size_t k_max);

/// Extends the smaller graph with isolated, zero-feature nodes so both
/// sides have max(n1, n2) nodes. Feature dimensions are untouched.
std::pair<Graph, Graph> pad_pair(const Graph& g1, const Graph& g2);

/// Pads a single graph to `n` nodes (no-op when already that size).
Graph pad_to(const Graph& g, std::size_t n);

}  // namespace gwca
