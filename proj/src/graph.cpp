#include "gwca/graph.hpp"

#include "gwca/error.hpp"

#include <cmath>
#include <string>

namespace gwca {

Graph::Graph(Matrix adjacency, Matrix features)
    : adjacency_(std::move(adjacency)), features_(std::move(features)) {
    const auto n = adjacency_.rows();
    if (n == 0) throw InvalidGraph("graph must have at least one node");
    if (adjacency_.cols() != n) throw InvalidGraph("adjacency matrix is not square");
    if (features_.rows() != n) {
        throw InvalidGraph("feature matrix has " + std::to_string(features_.rows()) +
                           " rows, expected " + std::to_string(n));
    }
    if (features_.cols() < 1) throw InvalidGraph("feature dimension must be at least 1");
    if (!adjacency_.allFinite() || !features_.allFinite()) {
        throw InvalidGraph("graph contains non-finite values");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (adjacency_(i, i) != 0.0) {
            throw InvalidGraph("nonzero diagonal at node " + std::to_string(i));
        }
    }
    const double asym = (adjacency_ - adjacency_.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTolerance) {
        throw InvalidGraph("adjacency is not symmetric (max deviation " + std::to_string(asym) + ")");
    }
    if (asym > 0.0) {
        Matrix sym = 0.5 * (adjacency_ + adjacency_.transpose());
        adjacency_ = std::move(sym);
    }
    if (adjacency_.minCoeff() < 0.0) throw InvalidGraph("adjacency has negative weights");
}

Graph Graph::with_features(Matrix features) const { return Graph(adjacency_, std::move(features)); }

Laplacian build_laplacian(const Graph& g, bool normalized) {
    const Matrix& a = g.adjacency();
    const Vector degree = a.rowwise().sum();
    const auto n = a.rows();
    if (!normalized) {
        Matrix l = -a;
        l.diagonal() = degree;
        return {std::move(l), false};
    }
    Vector inv_sqrt(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        inv_sqrt(i) = degree(i) > 0.0 ? 1.0 / std::sqrt(degree(i)) : 0.0;
    }
    Matrix l = -(inv_sqrt.asDiagonal() * a * inv_sqrt.asDiagonal());
    l.diagonal().array() += 1.0;
    // Restore exact symmetry lost to rounding in the diagonal scaling.
    l = 0.5 * (l + l.transpose()).eval();
    return {std::move(l), true};
}

std::vector<Matrix> laplacian_powers(const Laplacian& l, std::size_t k_max) {
    const auto n = l.matrix.rows();
    std::vector<Matrix> powers;
    powers.reserve(k_max + 1);
    powers.push_back(Matrix::Identity(n, n));
    for (std::size_t k = 1; k <= k_max; ++k) {
        Matrix next = powers.back() * l.matrix;
        next = 0.5 * (next + next.transpose()).eval();
        powers.push_back(std::move(next));
    }
    return powers;
}

Graph pad_to(const Graph& g, std::size_t n) {
    const auto cur = static_cast<Eigen::Index>(g.size());
    const auto target = static_cast<Eigen::Index>(n);
    if (target <= cur) return g;
    Matrix a = Matrix::Zero(target, target);
    a.topLeftCorner(cur, cur) = g.adjacency();
    Matrix x = Matrix::Zero(target, g.features().cols());
    x.topRows(cur) = g.features();
    return Graph(std::move(a), std::move(x));
}

std::pair<Graph, Graph> pad_pair(const Graph& g1, const Graph& g2) {
    const std::size_t n = std::max(g1.size(), g2.size());
    return {pad_to(g1, n), pad_to(g2, n)};
}

}  // namespace gwca
