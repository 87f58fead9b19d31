#include "gwca/spectral_filter.hpp"

#include "gwca/error.hpp"

#include <Eigen/Eigenvalues>

#include <string>

namespace gwca {

FilterSpec::FilterSpec(Matrix coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.rows() < 1) throw ConfigError("filter order must be at least 1");
    if (coeffs_.cols() < 1) throw ConfigError("filter needs at least one input channel");
    if (!coeffs_.allFinite()) throw ConfigError("filter coefficients must be finite");
}

FilterSpec FilterSpec::scalar(std::span<const double> theta) {
    Matrix c(static_cast<Eigen::Index>(theta.size()), 1);
    for (std::size_t k = 0; k < theta.size(); ++k) c(static_cast<Eigen::Index>(k), 0) = theta[k];
    return FilterSpec(std::move(c));
}

Spectrum compute_spectrum(const Laplacian& l) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(l.matrix);
    if (es.info() != Eigen::Success) throw Error("Laplacian eigendecomposition failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

namespace {

void check_signal(const Spectrum& spec, const Vector& x) {
    if (x.size() != spec.eigenvectors.rows()) {
        throw DimensionMismatch("signal length " + std::to_string(x.size()) + " does not match " +
                                std::to_string(spec.eigenvectors.rows()) + " nodes");
    }
}

}  // namespace

Vector graph_fourier(const Spectrum& spec, const Vector& x) {
    check_signal(spec, x);
    return spec.eigenvectors.transpose() * x;
}

Vector inverse_fourier(const Spectrum& spec, const Vector& x_hat) {
    check_signal(spec, x_hat);
    return spec.eigenvectors * x_hat;
}

Vector spectral_filter(const Spectrum& spec, std::span<const double> theta, const Vector& x) {
    check_signal(spec, x);
    Vector response(spec.eigenvalues.size());
    for (Eigen::Index i = 0; i < response.size(); ++i) {
        // Horner evaluation of sum_k theta_k lambda^k.
        double acc = 0.0;
        for (auto k = theta.size(); k-- > 0;) acc = acc * spec.eigenvalues(i) + theta[k];
        response(i) = acc;
    }
    return spec.eigenvectors * (response.asDiagonal() * (spec.eigenvectors.transpose() * x));
}

Vector polynomial_filter(std::span<const Matrix> powers, const FilterSpec& f, const Matrix& x) {
    if (powers.size() < f.order()) {
        throw DimensionMismatch("filter of order " + std::to_string(f.order()) + " needs " +
                                std::to_string(f.order()) + " Laplacian powers, got " +
                                std::to_string(powers.size()));
    }
    if (static_cast<std::size_t>(x.cols()) != f.channels()) {
        throw DimensionMismatch("feature matrix has " + std::to_string(x.cols()) +
                                " columns, filter expects " + std::to_string(f.channels()));
    }
    Vector z = Vector::Zero(x.rows());
    for (std::size_t k = 0; k < f.order(); ++k) {
        const Matrix& lk = powers[k];
        if (lk.rows() != x.rows() || lk.cols() != x.rows()) {
            throw DimensionMismatch("Laplacian power size does not match feature rows");
        }
        z.noalias() += lk * (x * f.coeffs().row(static_cast<Eigen::Index>(k)).transpose());
    }
    return z;
}

}  // namespace gwca
