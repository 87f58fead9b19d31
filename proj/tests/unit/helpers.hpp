#pragma once

// Test-only generators and reference routines. These deliberately avoid the
// library's own helpers so that they can act as independent oracles.

#include "gwca/graph.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace gwca::testing {

inline Matrix random_matrix(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
    std::normal_distribution<double> nd(0.0, scale);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = nd(gen);
    return m;
}

inline Matrix random_adjacency(std::mt19937_64& gen, Eigen::Index n, double density = 0.3) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix a = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            if (u(gen) < density) a(i, j) = a(j, i) = 0.05 + u(gen);
    return a;
}

inline Graph random_graph(std::mt19937_64& gen, Eigen::Index n, Eigen::Index d, double density = 0.3) {
    return Graph(random_adjacency(gen, n, density), random_matrix(gen, n, d));
}

/// Triple-loop product.
inline Matrix naive_matmul(const Matrix& a, const Matrix& b) {
    Matrix c = Matrix::Zero(a.rows(), b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (Eigen::Index k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

/// Normalized Laplacian written out entry by entry.
inline Matrix naive_normalized_laplacian(const Matrix& a) {
    const auto n = a.rows();
    std::vector<double> deg(static_cast<std::size_t>(n), 0.0);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) deg[static_cast<std::size_t>(i)] += a(i, j);
    Matrix l(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const double di = deg[static_cast<std::size_t>(i)];
            const double dj = deg[static_cast<std::size_t>(j)];
            const double scale = (di > 0 && dj > 0) ? a(i, j) / std::sqrt(di * dj) : 0.0;
            l(i, j) = (i == j ? 1.0 : 0.0) - scale;
        }
    return l;
}

/// Zero-pads features (and adjacency) of a graph the slow way.
inline Matrix pad_rows(const Matrix& x, Eigen::Index n) {
    Matrix out = Matrix::Zero(n, x.cols());
    out.topRows(x.rows()) = x;
    return out;
}

inline Matrix naive_power(const Matrix& l, int k) {
    Matrix p = Matrix::Identity(l.rows(), l.cols());
    for (int i = 0; i < k; ++i) p = naive_matmul(p, l);
    return p;
}

/// Two-pass population mean / variance in long double.
inline std::pair<double, double> two_pass_stats(const Vector& x) {
    long double s = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) s += x(i);
    const long double mean = s / x.size();
    long double v = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) v += (x(i) - mean) * (x(i) - mean);
    return {static_cast<double>(mean), static_cast<double>(v / x.size())};
}

inline double rel_err(const Matrix& got, const Matrix& want) {
    return (got - want).norm() / std::max(1.0, want.norm());
}

}  // namespace gwca::testing

#include <unistd.h>

#include <filesystem>
#include <string>

namespace gwca::testing {

/// Fresh directory removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("gwca_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace gwca::testing
