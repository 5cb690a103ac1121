#include "onsager/spectral_space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace onsager {

namespace {

const double kSqrtPi = std::sqrt(std::numbers::pi);

void check_shape(int n_modes, int grid_size) {
    if (n_modes < 1) {
        throw std::invalid_argument("SpectralFn needs at least one mode");
    }
    if (grid_size < 2) {
        throw std::invalid_argument("grid size must be >= 2, got " + std::to_string(grid_size));
    }
}

double evaluate_at(const Eigen::VectorXd& c, double theta) {
    double s = 0.0;
    for (Eigen::Index n = 0; n < c.size(); ++n) {
        s += c[n] * std::cos(2.0 * static_cast<double>(n + 1) * theta);
    }
    return s / kSqrtPi;
}

}  // namespace

int default_grid_size(int n_modes) { return std::max(256, 8 * n_modes); }

double grid_node(int j, int grid_size) {
    return 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(grid_size);
}

SpectralFn::SpectralFn(Eigen::VectorXd coeffs, int grid_size)
    : coeffs_(std::move(coeffs)), grid_size_(grid_size) {
    check_shape(static_cast<int>(coeffs_.size()), grid_size_);
}

SpectralFn::SpectralFn(std::vector<double> coeffs, int grid_size)
    : SpectralFn(Eigen::Map<const Eigen::VectorXd>(coeffs.data(),
                                                  static_cast<Eigen::Index>(coeffs.size())),
                 grid_size) {}

SpectralFn SpectralFn::zero(int n_modes, int grid_size) {
    check_shape(n_modes, grid_size);
    return SpectralFn(Eigen::VectorXd::Zero(n_modes), grid_size);
}

SpectralFn SpectralFn::basis(int n_modes, int grid_size, int mode, double amplitude) {
    if (mode < 1 || mode > n_modes) {
        throw std::invalid_argument("basis mode out of range");
    }
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n_modes);
    c[mode - 1] = amplitude;
    return SpectralFn(std::move(c), grid_size);
}

SpectralFn SpectralFn::with_coeffs(Eigen::VectorXd coeffs) const {
    return SpectralFn(std::move(coeffs), grid_size_);
}

SpectralFn SpectralFn::with_grid_size(int grid_size) const { return SpectralFn(coeffs_, grid_size); }

CosineTable::CosineTable(int n_modes, int grid_size)
    : n_modes_(n_modes), grid_size_(grid_size), values_(n_modes, grid_size) {
    check_shape(n_modes, grid_size);
    for (int j = 0; j < grid_size; ++j) {
        // Reduce the integer phase 2 n j mod M before taking the cosine so
        // the table is exact to roundoff for every mode.
        for (int n = 1; n <= n_modes; ++n) {
            const long long phase = (2LL * n * j) % grid_size;
            values_(n - 1, j) = std::cos(grid_node(static_cast<int>(phase), grid_size));
        }
    }
}

std::vector<double> synthesize(const SpectralFn& u, const CosineTable& table) {
    if (table.n_modes() < u.n_modes() || table.grid_size() != u.grid_size()) {
        throw std::invalid_argument("cosine table does not match spectral function");
    }
    const Eigen::VectorXd grid =
        table.values().topRows(u.n_modes()).transpose() * u.coeffs() / kSqrtPi;
    return {grid.data(), grid.data() + grid.size()};
}

std::vector<double> synthesize(const SpectralFn& u) {
    return synthesize(u, CosineTable(u.n_modes(), u.grid_size()));
}

double trapezoid(std::span<const double> grid_values) {
    double s = 0.0;
    for (double v : grid_values) {
        s += v;
    }
    return 2.0 * std::numbers::pi * s / static_cast<double>(grid_values.size());
}

SpectralFn analyze(std::span<const double> grid_values, int n_modes) {
    const int m = static_cast<int>(grid_values.size());
    if (n_modes < 1) {
        throw std::invalid_argument("analyze needs at least one mode");
    }
    if (m < 4 * n_modes) {
        throw std::invalid_argument("analyze: grid size " + std::to_string(m) + " < 4N = " +
                                    std::to_string(4 * n_modes) + " (aliasing)");
    }
    const CosineTable table(n_modes, m);
    const Eigen::Map<const Eigen::VectorXd> f(grid_values.data(), m);
    Eigen::VectorXd c = table.values() * f;
    c *= 2.0 * std::numbers::pi / static_cast<double>(m) / kSqrtPi;
    return SpectralFn(std::move(c), m);
}

double inner_x(const SpectralFn& u, const SpectralFn& v) {
    if (u.n_modes() != v.n_modes()) {
        throw std::invalid_argument("inner_x: dimension mismatch");
    }
    return u.coeffs().dot(v.coeffs());
}

double inner_y(const SpectralFn& u, const SpectralFn& v) {
    if (u.n_modes() != v.n_modes()) {
        throw std::invalid_argument("inner_y: dimension mismatch");
    }
    double s = 0.0;
    for (int n = 1; n <= u.n_modes(); ++n) {
        s += (1.0 + 4.0 * n * n) * u.coeff(n) * v.coeff(n);
    }
    return s;
}

double sup_norm(const SpectralFn& u) {
    const int samples = std::max(4096, 32 * u.n_modes());
    const double h = std::numbers::pi / samples;  // pi-periodic: half circle suffices
    double best = -1.0;
    double best_theta = 0.0;
    for (int j = 0; j < samples; ++j) {
        const double theta = h * j;
        const double v = std::abs(evaluate_at(u.coeffs(), theta));
        if (v > best) {
            best = v;
            best_theta = theta;
        }
    }
    // Golden-section refinement of |u| on the bracketing cell pair.
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = best_theta - h;
    double b = best_theta + h;
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = std::abs(evaluate_at(u.coeffs(), x1));
    double f2 = std::abs(evaluate_at(u.coeffs(), x2));
    for (int it = 0; it < 60; ++it) {
        if (f1 > f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = std::abs(evaluate_at(u.coeffs(), x1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = std::abs(evaluate_at(u.coeffs(), x2));
        }
    }
    return std::max({best, f1, f2});
}

double derivative_l2_norm(const SpectralFn& u) {
    // (phi_n)' = -2n sin(2n theta)/sqrt(pi) has unit L2 norm times 2n.
    double s = 0.0;
    for (int n = 1; n <= u.n_modes(); ++n) {
        s += 4.0 * n * n * u.coeff(n) * u.coeff(n);
    }
    return std::sqrt(s);
}

}  // namespace onsager
