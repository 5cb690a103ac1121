#pragma once

#include "onsager/kernel.hpp"
#include "onsager/spectral_space.hpp"

#include <Eigen/Dense>

#include <memory>
#include <vector>

namespace onsager {

/// Everything needed to evaluate A[u] = u - lambda Gamma[u] at Galerkin level N.
class OperatorContext {
public:
    /// grid_size <= 0 selects default_grid_size(n_trunc).
    OperatorContext(KernelSpec kernel, double lambda, int n_trunc, int grid_size = 0);

    const KernelSpec& kernel() const { return kernel_; }
    double lambda() const { return lambda_; }
    int n_trunc() const { return n_trunc_; }
    int grid_size() const { return grid_size_; }
    const CosineTable& table() const { return *table_; }

    OperatorContext with_lambda(double lambda) const;

    SpectralFn zero() const { return SpectralFn::zero(n_trunc_, grid_size_); }
    SpectralFn function(Eigen::VectorXd coeffs) const { return SpectralFn(std::move(coeffs), grid_size_); }

private:
    KernelSpec kernel_;
    double lambda_;
    int n_trunc_;
    int grid_size_;
    std::shared_ptr<const CosineTable> table_;
};

/// Boltzmann density e^{-u} / int e^{-u} on the quadrature grid.
struct BoltzmannMeasure {
    std::vector<double> weights;

    /// Trapezoid integral of the density (1 up to roundoff).
    double total() const;
};

/// Exponentiation guard on max |u| over the grid.
inline constexpr double kExponentGuard = 700.0;

BoltzmannMeasure boltzmann(const SpectralFn& u, const OperatorContext& ctx);

/// First N cosine moments c_n = int cos(2 n theta) dmu_u.
Eigen::VectorXd cosine_moments(const BoltzmannMeasure& mu, const OperatorContext& ctx);

/// Gamma[u] through its mode formula: phi_n coefficient sqrt(pi) k_n c_n[u].
SpectralFn gamma(const SpectralFn& u, const OperatorContext& ctx);

/// Gamma[u] through direct quadrature of the convolution integral, then
/// projected onto phi_1..phi_N. Independent route used for cross-checks.
SpectralFn gamma_by_convolution(const SpectralFn& u, const OperatorContext& ctx);

SpectralFn residual(const SpectralFn& u, const OperatorContext& ctx);

/// a(n, m) = <DGamma[u](phi_n), phi_m> = k_m (c_n c_m - int cos 2n cos 2m dmu),
/// stored with 0-based indices (row n-1, column m-1).
Eigen::MatrixXd jacobian(const SpectralFn& u, const OperatorContext& ctx);

/// Jacobian of the coefficient map c -> c - lambda Gamma(c):
/// d residual_m / d c_n = delta_mn - lambda a(n, m), i.e. I - lambda a^T.
/// Same determinant as Id - lambda a.
Eigen::MatrixXd residual_jacobian(const SpectralFn& u, const OperatorContext& ctx);

/// <A[u], phi_k>_X, k = 1..N.
Eigen::VectorXd finite_rank_x(const SpectralFn& u, const OperatorContext& ctx);
/// <A[u], phi_k>_Y = (1 + 4k^2) <A[u], phi_k>_X.
Eigen::VectorXd finite_rank_y(const SpectralFn& u, const OperatorContext& ctx);
/// Diagonal (1 + 4k^2) relating the two pairings.
Eigen::VectorXd y_pairing_weights(int n_modes);

struct GrussReport {
    double max_ratio;  // max_{n,m} |a(n,m)| / |k_m|
    int argmax_n;
    int argmax_m;
    bool within_bound;  // max_ratio <= 1 + 1e-8
};

GrussReport gruss_check(const SpectralFn& u, const OperatorContext& ctx);

struct BoundCheck {
    double sup_norm;
    double apriori_bound;  // lambda ||K||_inf
    double derivative_norm;
    double regularity_bound;  // 2 pi lambda ||K'||_inf
    bool apriori_ok;
    bool regularity_ok;
};

/// A-priori sup bound and the derivative bound that every zero must satisfy.
BoundCheck check_bounds(const SpectralFn& u, const OperatorContext& ctx, double slack = 1e-6);

/// lambda_n = -2 / k_n for n = 1..N (Galerkin-level bifurcation values).
std::vector<double> level_bifurcation_values(const OperatorContext& ctx);

/// Throws NearBifurcation when |lambda - lambda_n| < band for some n <= N.
void guard_bifurcation_band(const OperatorContext& ctx, double band = 1e-6);

}  // namespace onsager
