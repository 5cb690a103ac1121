#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace onsager {

/// Default quadrature size for a Galerkin level: max(256, 8N).
int default_grid_size(int n_modes);

/// An element of Y: even, pi-periodic, zero-mean functions on [0, 2pi],
/// stored as coefficients of phi_n(theta) = cos(2 n theta) / sqrt(pi),
/// n = 1..N. There is no constant mode and no sine mode, so the symmetry
/// constraints hold by construction.
class SpectralFn {
public:
    SpectralFn(Eigen::VectorXd coeffs, int grid_size);
    SpectralFn(std::vector<double> coeffs, int grid_size);

    static SpectralFn zero(int n_modes, int grid_size);
    /// amplitude * phi_mode  (mode is 1-based)
    static SpectralFn basis(int n_modes, int grid_size, int mode, double amplitude = 1.0);

    int n_modes() const { return static_cast<int>(coeffs_.size()); }
    int grid_size() const { return grid_size_; }
    const Eigen::VectorXd& coeffs() const { return coeffs_; }
    /// 1-based coefficient access, matching the basis indexing.
    double coeff(int mode) const { return coeffs_[mode - 1]; }

    SpectralFn with_coeffs(Eigen::VectorXd coeffs) const;
    SpectralFn with_grid_size(int grid_size) const;

private:
    Eigen::VectorXd coeffs_;
    int grid_size_;
};

/// Table of cos(2 n theta_j), theta_j = 2 pi j / M, stored row-per-mode.
class CosineTable {
public:
    CosineTable(int n_modes, int grid_size);

    int n_modes() const { return n_modes_; }
    int grid_size() const { return grid_size_; }
    /// Row n-1 holds cos(2 n theta_j) for j = 0..M-1.
    const Eigen::MatrixXd& values() const { return values_; }

private:
    int n_modes_;
    int grid_size_;
    Eigen::MatrixXd values_;
};

double grid_node(int j, int grid_size);

/// Values of u on the uniform periodic grid of u.grid_size() points.
std::vector<double> synthesize(const SpectralFn& u);
std::vector<double> synthesize(const SpectralFn& u, const CosineTable& table);

/// Periodic-trapezoid projection onto phi_1..phi_N. Requires M >= 4N.
SpectralFn analyze(std::span<const double> grid_values, int n_modes);

/// Periodic trapezoid rule for a function sampled on the uniform grid.
double trapezoid(std::span<const double> grid_values);

double inner_x(const SpectralFn& u, const SpectralFn& v);
double inner_y(const SpectralFn& u, const SpectralFn& v);

/// sup |u| estimated on a refined grid (at least 4096 points, 16 per mode).
double sup_norm(const SpectralFn& u);
/// ||u'||_{L^2(0, 2pi)}, exact for the trigonometric polynomial.
double derivative_l2_norm(const SpectralFn& u);

}  // namespace onsager
