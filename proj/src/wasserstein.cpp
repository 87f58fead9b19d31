#include "gwca/wasserstein.hpp"

#include "gwca/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gwca {

SignalStats signal_stats(const Vector& x) {
    if (x.size() == 0) throw DimensionMismatch("signal_stats of an empty signal");
    const auto n = static_cast<double>(x.size());
    const double mean = x.sum() / n;
    double var = (x.array() - mean).square().sum() / n;
    if (var < kVarianceClamp) var = std::max(var, 0.0);
    return {mean, var, static_cast<std::size_t>(x.size())};
}

SignalStats padded_stats(const SignalStats& s, std::size_t n) {
    if (n <= s.count) return s;
    const double keep = static_cast<double>(s.count) / static_cast<double>(n);
    return {s.mean * keep, keep * s.variance + keep * (1.0 - keep) * s.mean * s.mean, n};
}

double w2_gaussian(const SignalStats& s1, const SignalStats& s2) {
    const double dm = s1.mean - s2.mean;
    const double ds = std::sqrt(std::max(s1.variance, 0.0)) - std::sqrt(std::max(s2.variance, 0.0));
    return dm * dm + ds * ds;
}

double w2_distance(const SignalStats& s1, const SignalStats& s2) { return std::sqrt(w2_gaussian(s1, s2)); }

double multichannel_w2(std::span<const SignalStats> s1, std::span<const SignalStats> s2,
                       std::span<const double> weights) {
    if (s1.size() != s2.size()) throw DimensionMismatch("channel counts differ");
    if (!weights.empty() && weights.size() != s1.size()) {
        throw DimensionMismatch("channel weight count does not match channels");
    }
    double total = 0.0;
    for (std::size_t j = 0; j < s1.size(); ++j) {
        const double d = w2_gaussian(s1[j], s2[j]);
        total += weights.empty() ? d : weights[j] * d;
    }
    return total;
}

namespace {

// Rows of H P, where H = I - (1/n) 11^T centers each column.
Matrix center_columns(const Matrix& p) { return p.rowwise() - p.colwise().mean(); }

}  // namespace

PairKernels build_pair_kernels(std::span<const Matrix> powers1, std::span<const Matrix> powers2,
                               std::size_t k, std::size_t n1, std::size_t n2) {
    if (n1 != n2) {
        throw DimensionMismatch("pair kernels need equal node counts (got " + std::to_string(n1) +
                                " and " + std::to_string(n2) + "); pad the pair first");
    }
    if (k >= powers1.size() || k >= powers2.size()) {
        throw DimensionMismatch("Laplacian power " + std::to_string(k) + " not available");
    }
    const Matrix& l1 = powers1[k];
    const Matrix& l2 = powers2[k];
    const auto n = static_cast<Eigen::Index>(n1);
    if (l1.rows() != n || l1.cols() != n || l2.rows() != n || l2.cols() != n) {
        throw DimensionMismatch("Laplacian power shape does not match node count");
    }
    const double nd = static_cast<double>(n1);

    // 1^T L^k as a row vector, so K_mu = (1/n^2) (1^T L)^T (1^T L).
    const Eigen::RowVectorXd s1 = l1.colwise().sum();
    const Eigen::RowVectorXd s2 = l2.colwise().sum();
    const Matrix c1 = center_columns(l1);
    const Matrix c2 = center_columns(l2);

    PairKernels out;
    out.order = k;
    out.k_mu1 = s1.transpose() * s1 / (nd * nd);
    out.k_mu2 = s2.transpose() * s2 / (nd * nd);
    out.k_mu12 = s1.transpose() * s2 / (nd * nd);
    out.k_sigma1 = c1.transpose() * c1 / nd;
    out.k_sigma2 = c2.transpose() * c2 / nd;
    out.k_sigma12 = c1.transpose() * c2 / nd;
    return out;
}

CauchyBound cauchy_cross_bound(const Vector& x1c, const Vector& x2c) {
    if (x1c.size() != x2c.size()) {
        throw DimensionMismatch("centered signals differ in length (" + std::to_string(x1c.size()) +
                                " vs " + std::to_string(x2c.size()) + ")");
    }
    if (x1c.size() == 0) throw DimensionMismatch("empty signals");
    const double n = static_cast<double>(x1c.size());
    const double sigma1 = x1c.squaredNorm() / n;
    const double sigma2 = x2c.squaredNorm() / n;
    return {std::sqrt(sigma1 * sigma2), x1c.dot(x2c) / n};
}

double w2_upper_bound(const PairKernels& kernels, const Matrix& x1, const Matrix& x2,
                      const Vector& w1, const Vector& w2) {
    if (x1.rows() != kernels.k_mu1.rows() || x2.rows() != kernels.k_mu2.rows()) {
        throw DimensionMismatch("feature rows do not match kernel size");
    }
    if (x1.cols() != w1.size() || x2.cols() != w2.size()) {
        throw DimensionMismatch("projection length does not match feature dimension");
    }
    const Vector y1 = x1 * w1;
    const Vector y2 = x2 * w2;
    return y1.dot((kernels.k_mu1 + kernels.k_sigma1) * y1) + y2.dot((kernels.k_mu2 + kernels.k_sigma2) * y2) -
           2.0 * y1.dot((kernels.k_mu12 + kernels.k_sigma12) * y2);
}

}  // namespace gwca
