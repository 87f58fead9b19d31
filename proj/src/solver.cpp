#include "gwca/solver.hpp"

#include "gwca/error.hpp"
#include "gwca/parallel.hpp"
#include "gwca/wasserstein.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <string>

namespace gwca {

namespace {

void check_lift(const FeatureLift& lift) {
    if (lift.order < 1) throw ConfigError("polynomial order must be at least 1");
}

Matrix stack_powers(const std::vector<Matrix>& powers, const Matrix& x, std::size_t order) {
    const auto d = x.cols();
    Matrix out(x.rows(), static_cast<Eigen::Index>(order) * d);
    for (std::size_t k = 0; k < order; ++k) {
        out.middleCols(static_cast<Eigen::Index>(k) * d, d).noalias() = powers[k] * x;
    }
    return out;
}

struct PairContribution {
    Matrix c1;
    Matrix c2;
    Matrix c12;
};

void add_pair(const GraphPair& pair, const FeatureLift& lift, PairContribution& acc) {
    const auto [g1, g2] = pad_pair(pair.first, pair.second);
    const auto n = g1.size();
    const auto p1 = laplacian_powers(build_laplacian(g1), lift.order - 1);
    const auto p2 = laplacian_powers(build_laplacian(g2), lift.order - 1);

    Matrix f1;
    Matrix f2;
    if (lift.fusion) {
        f1 = stack_powers(p1, g1.features(), lift.order);
        f2 = stack_powers(p2, g2.features(), lift.order);
    } else {
        f1 = g1.features();
        f2 = g2.features();
    }
    const auto k = build_pair_kernels(p1, p2, lift.kernel_power(), n, n);

    const Matrix kf1 = (k.k_mu1 + k.k_sigma1) * f1;
    const Matrix kf2 = (k.k_mu2 + k.k_sigma2) * f2;
    const Matrix kf12 = (k.k_mu12 + k.k_sigma12) * f2;
    acc.c1.noalias() += f1.transpose() * kf1;
    acc.c2.noalias() += f2.transpose() * kf2;
    acc.c12.noalias() += f1.transpose() * kf12;
}

constexpr std::size_t kChunkSize = 16;

}  // namespace

Matrix lifted_features(const Graph& g, const FeatureLift& lift) {
    check_lift(lift);
    if (!lift.fusion) return g.features();
    const auto powers = laplacian_powers(build_laplacian(g), lift.order - 1);
    return stack_powers(powers, g.features(), lift.order);
}

Matrix filtered_features(const Graph& g, const FeatureLift& lift) {
    check_lift(lift);
    const auto powers = laplacian_powers(build_laplacian(g), lift.order - 1);
    if (lift.fusion) return stack_powers(powers, g.features(), lift.order);
    return powers[lift.order - 1] * g.features();
}

CorrelationMatrices accumulate(std::span<const GraphPair> pairs, const FeatureLift& lift,
                               std::size_t threads) {
    check_lift(lift);
    if (pairs.empty()) throw ConfigError("accumulate needs at least one graph pair");
    const std::size_t d1 = pairs.front().first.feature_dim();
    const std::size_t d2 = pairs.front().second.feature_dim();
    for (std::size_t m = 0; m < pairs.size(); ++m) {
        if (pairs[m].first.feature_dim() != d1 || pairs[m].second.feature_dim() != d2) {
            throw DimensionMismatch("pair " + std::to_string(m) + " has feature dimensions (" +
                                    std::to_string(pairs[m].first.feature_dim()) + ", " +
                                    std::to_string(pairs[m].second.feature_dim()) + "), expected (" +
                                    std::to_string(d1) + ", " + std::to_string(d2) + ")");
        }
    }
    const auto dim1 = static_cast<Eigen::Index>(lift.lifted_dim(d1));
    const auto dim2 = static_cast<Eigen::Index>(lift.lifted_dim(d2));
    auto zero = [&] {
        return PairContribution{Matrix::Zero(dim1, dim1), Matrix::Zero(dim2, dim2), Matrix::Zero(dim1, dim2)};
    };

    const std::size_t chunks = (pairs.size() + kChunkSize - 1) / kChunkSize;
    std::vector<PairContribution> partial(chunks);
    parallel_for(chunks, threads, [&](std::size_t c) {
        PairContribution acc = zero();
        const std::size_t end = std::min(pairs.size(), (c + 1) * kChunkSize);
        for (std::size_t m = c * kChunkSize; m < end; ++m) add_pair(pairs[m], lift, acc);
        partial[c] = std::move(acc);
    });

    PairContribution total = zero();
    for (const auto& p : partial) {
        total.c1 += p.c1;
        total.c2 += p.c2;
        total.c12 += p.c12;
    }
    CorrelationMatrices cm;
    cm.c1 = 0.5 * (total.c1 + total.c1.transpose());
    cm.c2 = 0.5 * (total.c2 + total.c2.transpose());
    cm.c12 = std::move(total.c12);
    cm.c21 = cm.c12.transpose();
    cm.pair_count = pairs.size();
    cm.lift = lift;
    cm.d1 = d1;
    cm.d2 = d2;
    return cm;
}

std::pair<Matrix, Matrix> regularized_views(const CorrelationMatrices& cm, double reg) {
    auto bump = [reg](const Matrix& c) {
        Matrix r = c;
        r.diagonal().array() += reg * c.trace() / static_cast<double>(c.rows());
        return r;
    };
    return {bump(cm.c1), bump(cm.c2)};
}

namespace {

// C^{-1/2} through the symmetric eigendecomposition.
Matrix inverse_sqrt(const Matrix& c, const char* view) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(c);
    if (es.info() != Eigen::Success) throw SolverError(view, "eigendecomposition failed");
    const Vector& ev = es.eigenvalues();
    const double top = ev.maxCoeff();
    if (!(top > 0.0) || ev.minCoeff() <= top * 1e-14) {
        throw SolverError(view, "regularized correlation matrix is singular (min eigenvalue " +
                                    std::to_string(ev.minCoeff()) + ", max " + std::to_string(top) +
                                    "); increase the regularization");
    }
    return es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

CorrelationModel solve(const CorrelationMatrices& cm, double reg, std::size_t channels) {
    if (!(reg > 0.0)) throw ConfigError("regularization must be positive");
    const auto dim1 = static_cast<std::size_t>(cm.c1.rows());
    const auto dim2 = static_cast<std::size_t>(cm.c2.rows());
    const std::size_t max_r = std::min(dim1, dim2);
    if (channels == 0) channels = std::min(max_r, kDefaultChannelCap);
    if (channels > max_r) {
        throw ConfigError("requested " + std::to_string(channels) + " channels but at most " +
                          std::to_string(max_r) + " are available");
    }

    const auto [r1, r2] = regularized_views(cm, reg);
    const Matrix white1 = inverse_sqrt(r1, "view1");
    const Matrix white2 = inverse_sqrt(r2, "view2");
    const Matrix t = white1 * cm.c12 * white2;
    Eigen::BDCSVD<Matrix> svd(t, Eigen::ComputeThinU | Eigen::ComputeThinV);

    const auto r = static_cast<Eigen::Index>(channels);
    CorrelationModel model;
    model.w1 = white1 * svd.matrixU().leftCols(r);
    model.w2 = white2 * svd.matrixV().leftCols(r);
    model.rho = svd.singularValues().head(r);
    model.lift = cm.lift;
    model.reg = reg;
    model.d1 = cm.d1;
    model.d2 = cm.d2;

    for (Eigen::Index j = 0; j < r; ++j) {
        Eigen::Index arg = 0;
        model.w1.col(j).cwiseAbs().maxCoeff(&arg);
        if (model.w1(arg, j) < 0.0) {
            model.w1.col(j) *= -1.0;
            model.w2.col(j) *= -1.0;
        }
    }
    return model;
}

EigenResiduals eigen_residuals(const CorrelationMatrices& cm, const CorrelationModel& model) {
    const auto [r1, r2] = regularized_views(cm, model.reg);
    const Eigen::LDLT<Matrix> inv1(r1);
    const Eigen::LDLT<Matrix> inv2(r2);
    EigenResiduals out;
    for (Eigen::Index j = 0; j < model.rho.size(); ++j) {
        const double rho2 = model.rho(j) * model.rho(j);
        const Vector a = model.w1.col(j);
        const Vector b = model.w2.col(j);
        const Vector lhs1 = inv1.solve(cm.c12 * inv2.solve(cm.c21 * a));
        const Vector lhs2 = inv2.solve(cm.c21 * inv1.solve(cm.c12 * b));
        out.view1.push_back((lhs1 - rho2 * a).norm() / a.norm());
        out.view2.push_back((lhs2 - rho2 * b).norm() / b.norm());
    }
    return out;
}

Matrix project(const CorrelationModel& model, const Graph& g, View view) {
    const std::size_t d = view == View::first ? model.d1 : model.d2;
    if (g.feature_dim() != d) {
        throw DimensionMismatch("graph has feature dimension " + std::to_string(g.feature_dim()) +
                                ", model view " + std::to_string(static_cast<int>(view)) + " expects " +
                                std::to_string(d));
    }
    const Matrix& w = view == View::first ? model.w1 : model.w2;
    return filtered_features(g, model.lift) * w;
}

FilterSpec channel_filter(const CorrelationModel& model, View view, std::size_t channel) {
    if (channel >= model.channels()) throw DimensionMismatch("channel index out of range");
    const std::size_t d = view == View::first ? model.d1 : model.d2;
    const Matrix& w = view == View::first ? model.w1 : model.w2;
    const auto order = static_cast<Eigen::Index>(model.lift.order);
    const auto dd = static_cast<Eigen::Index>(d);
    const auto j = static_cast<Eigen::Index>(channel);
    Matrix coeffs = Matrix::Zero(order, dd);
    if (model.lift.fusion) {
        for (Eigen::Index k = 0; k < order; ++k) coeffs.row(k) = w.col(j).segment(k * dd, dd).transpose();
    } else {
        coeffs.row(order - 1) = w.col(j).transpose();
    }
    return FilterSpec(std::move(coeffs));
}

}  // namespace gwca
