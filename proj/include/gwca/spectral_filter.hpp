#pragma once

#include "gwca/graph.hpp"

#include <span>

namespace gwca {

/// Polynomial filter coefficients. Row k of `coeffs` is w^(k), the weights
/// of the L^k term across the d input channels. `order()` is the number of
/// terms, so the highest power applied is order() - 1.
class FilterSpec {
public:
    explicit FilterSpec(Matrix coeffs);

    /// Single-channel filter from a coefficient list theta_0..theta_{K-1}.
    static FilterSpec scalar(std::span<const double> theta);

    std::size_t order() const noexcept { return static_cast<std::size_t>(coeffs_.rows()); }
    std::size_t channels() const noexcept { return static_cast<std::size_t>(coeffs_.cols()); }
    const Matrix& coeffs() const noexcept { return coeffs_; }

private:
    Matrix coeffs_;
};

/// Eigendecomposition L = U diag(eigenvalues) U^T, eigenvalues ascending.
struct Spectrum {
    Vector eigenvalues;
    Matrix eigenvectors;
};

Spectrum compute_spectrum(const Laplacian& l);

/// U^T x.
Vector graph_fourier(const Spectrum& spec, const Vector& x);
/// U x_hat.
Vector inverse_fourier(const Spectrum& spec, const Vector& x_hat);

/// Frequency-domain filtering: U diag(F(lambda_i)) U^T x, with
/// F(lambda) = sum_k theta_k lambda^k.
Vector spectral_filter(const Spectrum& spec, std::span<const double> theta, const Vector& x);

/// z = sum_k L^k X w^(k). Uses the precomputed powers only; no
/// eigendecomposition is involved.
Vector polynomial_filter(std::span<const Matrix> powers, const FilterSpec& f, const Matrix& x);

}  // namespace gwca
