#pragma once

#include "gwca/graph.hpp"

#include <span>

namespace gwca {

/// Population mean and variance (1/n normalization) of a node signal.
struct SignalStats {
    double mean = 0.0;
    double variance = 0.0;
    std::size_t count = 0;
};

inline constexpr double kVarianceClamp = 1e-12;

SignalStats signal_stats(const Vector& x);

/// Statistics of the same signal after appending `n - count` zero entries,
/// i.e. what signal_stats would return on the zero-padded graph.
SignalStats padded_stats(const SignalStats& s, std::size_t n);

/// Squared 2-Wasserstein distance between the 1-D Gaussians N(mean, variance):
/// (mu1 - mu2)^2 + (sqrt(var1) - sqrt(var2))^2.
double w2_gaussian(const SignalStats& s1, const SignalStats& s2);

/// sqrt(w2_gaussian), the metric itself.
double w2_distance(const SignalStats& s1, const SignalStats& s2);

/// Sum of per-channel w2_gaussian values. If `weights` is nonempty, channel j
/// contributes weights[j] * D_j.
double multichannel_w2(std::span<const SignalStats> s1, std::span<const SignalStats> s2,
                       std::span<const double> weights = {});

/// The six kernel matrices of a graph pair at polynomial order k.
struct PairKernels {
    Matrix k_mu1;
    Matrix k_mu2;
    Matrix k_mu12;
    Matrix k_sigma1;
    Matrix k_sigma2;
    Matrix k_sigma12;
    std::size_t order = 0;
};

/// Evaluates the kernel matrices from L1^k and L2^k. Both graphs must have
/// the same node count (pad first); unequal sizes raise DimensionMismatch.
PairKernels build_pair_kernels(std::span<const Matrix> powers1, std::span<const Matrix> powers2,
                               std::size_t k, std::size_t n1, std::size_t n2);

struct CauchyBound {
    double lhs = 0.0;  ///< (Sigma1 Sigma2)^{1/2}
    double rhs = 0.0;  ///< x1c . x2c / sqrt(n1 n2)
};

/// Both sides of the Cauchy step for centered signals of equal length.
CauchyBound cauchy_cross_bound(const Vector& x1c, const Vector& x2c);

/// Quadratic-form upper bound on the squared distance between the filtered
/// signals L1^k X1 w1 and L2^k X2 w2.
double w2_upper_bound(const PairKernels& kernels, const Matrix& x1, const Matrix& x2,
                      const Vector& w1, const Vector& w2);

}  // namespace gwca
