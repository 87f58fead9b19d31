#pragma once

#include "gwca/graph.hpp"
#include "gwca/spectral_filter.hpp"

#include <span>
#include <utility>
#include <vector>

namespace gwca {

using GraphPair = std::pair<Graph, Graph>;

/// How node features are lifted before correlation analysis.
///
/// `order` is the number of polynomial terms K (powers 0..K-1). With fusion
/// the per-graph features become [L^0 X, L^1 X, ..., L^{K-1} X] and the
/// kernels are taken at power 0; without fusion only the L^{K-1} term is
/// used.
struct FeatureLift {
    std::size_t order = 2;
    bool fusion = true;

    std::size_t lifted_dim(std::size_t d) const noexcept { return fusion ? order * d : d; }
    std::size_t kernel_power() const noexcept { return fusion ? 0 : order - 1; }
};

/// Feature matrix that enters the kernel quadratic forms for one graph:
/// the fused block matrix, or X itself when fusion is off.
Matrix lifted_features(const Graph& g, const FeatureLift& lift);

/// Node signals L^k X (or the fused equivalent), one column per lifted
/// feature. Multiplying by a projection vector gives the filtered signal.
Matrix filtered_features(const Graph& g, const FeatureLift& lift);

struct CorrelationMatrices {
    Matrix c1;
    Matrix c2;
    Matrix c12;
    Matrix c21;
    std::size_t pair_count = 0;
    FeatureLift lift;
    std::size_t d1 = 0;  ///< raw feature dimension of view 1
    std::size_t d2 = 0;
};

/// Sums the kernel-weighted second-moment matrices over matched pairs.
/// Each pair is zero-padded to a common node count first. Work is split
/// into fixed-size chunks so the result does not depend on `threads`.
CorrelationMatrices accumulate(std::span<const GraphPair> pairs, const FeatureLift& lift,
                               std::size_t threads = 1);

inline constexpr double kDefaultRegularization = 1e-6;
inline constexpr std::size_t kDefaultChannelCap = 240;

/// Regularized C1 + eps1 I and C2 + eps2 I with eps_v = reg * tr(C_v) / D_v.
std::pair<Matrix, Matrix> regularized_views(const CorrelationMatrices& cm, double reg);

struct CorrelationModel {
    Matrix w1;   ///< D1 x r
    Matrix w2;   ///< D2 x r
    Vector rho;  ///< length r, descending
    FeatureLift lift;
    double reg = kDefaultRegularization;
    std::size_t d1 = 0;
    std::size_t d2 = 0;

    std::size_t channels() const noexcept { return static_cast<std::size_t>(rho.size()); }
};

/// Canonical correlation solve on the regularized matrices.
///
/// Columns satisfy C1^-1 C12 C2^-1 C21 w1 = rho^2 w1 (and the view-2
/// counterpart), are scaled so w^T C w = 1, and carry the sign that makes
/// the largest-magnitude entry of w1 positive. `channels == 0` selects
/// min(D1, D2, 240). Throws SolverError naming the view whose regularized
/// matrix is numerically singular.
CorrelationModel solve(const CorrelationMatrices& cm, double reg = kDefaultRegularization,
                       std::size_t channels = 0);

struct EigenResiduals {
    std::vector<double> view1;
    std::vector<double> view2;
};

/// ||A w - rho^2 w|| / ||w|| per channel for both eigen-equations, using
/// the regularized matrices the model was solved with.
EigenResiduals eigen_residuals(const CorrelationMatrices& cm, const CorrelationModel& model);

enum class View { first = 1, second = 2 };

/// n x r projected signals of `g` under the given view's projections.
Matrix project(const CorrelationModel& model, const Graph& g, View view);

/// The polynomial filter equivalent to channel j of a view, as a K x d
/// coefficient matrix.
FilterSpec channel_filter(const CorrelationModel& model, View view, std::size_t channel);

}  // namespace gwca
