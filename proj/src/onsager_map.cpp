#include "onsager/onsager_map.hpp"

#include "onsager/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace onsager {

namespace {

const double kSqrtPi = std::sqrt(std::numbers::pi);

void require_level(const SpectralFn& u, const OperatorContext& ctx) {
    if (u.n_modes() != ctx.n_trunc() || u.grid_size() != ctx.grid_size()) {
        std::ostringstream os;
        os << "spectral function (N=" << u.n_modes() << ", M=" << u.grid_size()
           << ") does not match operator context (N=" << ctx.n_trunc() << ", M=" << ctx.grid_size()
           << ")";
        throw std::invalid_argument(os.str());
    }
}

// Probability weights p_j = (2 pi / M) * density(theta_j), summing to 1.
Eigen::VectorXd probabilities(const BoltzmannMeasure& mu) {
    const auto m = static_cast<Eigen::Index>(mu.weights.size());
    return Eigen::Map<const Eigen::VectorXd>(mu.weights.data(), m) *
           (2.0 * std::numbers::pi / static_cast<double>(m));
}

Eigen::VectorXd kernel_row(const OperatorContext& ctx) {
    Eigen::VectorXd k(ctx.n_trunc());
    for (int n = 1; n <= ctx.n_trunc(); ++n) {
        k[n - 1] = ctx.kernel().k(n);
    }
    return k;
}

}  // namespace

OperatorContext::OperatorContext(KernelSpec kernel, double lambda, int n_trunc, int grid_size)
    : kernel_(std::move(kernel)),
      lambda_(lambda),
      n_trunc_(n_trunc),
      grid_size_(grid_size > 0 ? grid_size : default_grid_size(n_trunc)) {
    if (!(lambda_ >= 0.0) || !std::isfinite(lambda_)) {
        throw std::invalid_argument("lambda must be finite and nonnegative");
    }
    if (n_trunc_ < 1 || n_trunc_ > kernel_.n_modes()) {
        std::ostringstream os;
        os << "truncation level N=" << n_trunc_ << " must be in [1, " << kernel_.n_modes()
           << "] (kernel modes)";
        throw std::invalid_argument(os.str());
    }
    if (grid_size_ < 4 * n_trunc_) {
        throw std::invalid_argument("grid size must satisfy M >= 4N");
    }
    table_ = std::make_shared<const CosineTable>(n_trunc_, grid_size_);
}

OperatorContext OperatorContext::with_lambda(double lambda) const {
    OperatorContext copy = *this;
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("lambda must be finite and nonnegative");
    }
    copy.lambda_ = lambda;
    return copy;
}

double BoltzmannMeasure::total() const { return trapezoid(weights); }

BoltzmannMeasure boltzmann(const SpectralFn& u, const OperatorContext& ctx) {
    require_level(u, ctx);
    const std::vector<double> grid = synthesize(u, ctx.table());
    const auto [lo, hi] = std::minmax_element(grid.begin(), grid.end());
    if (std::max(std::abs(*lo), std::abs(*hi)) > kExponentGuard) {
        std::ostringstream os;
        os << "boltzmann: max|u| = " << std::max(std::abs(*lo), std::abs(*hi))
           << " exceeds the exponent guard " << kExponentGuard;
        throw RangeError(os.str());
    }
    BoltzmannMeasure mu;
    mu.weights.resize(grid.size());
    const double shift = *lo;  // largest exponent becomes e^0
    for (std::size_t j = 0; j < grid.size(); ++j) {
        mu.weights[j] = std::exp(-(grid[j] - shift));
    }
    const double z = trapezoid(mu.weights);
    for (double& w : mu.weights) {
        w /= z;
    }
    return mu;
}

Eigen::VectorXd cosine_moments(const BoltzmannMeasure& mu, const OperatorContext& ctx) {
    return ctx.table().values() * probabilities(mu);
}

SpectralFn gamma(const SpectralFn& u, const OperatorContext& ctx) {
    const Eigen::VectorXd c = cosine_moments(boltzmann(u, ctx), ctx);
    return ctx.function(kSqrtPi * kernel_row(ctx).cwiseProduct(c));
}

SpectralFn gamma_by_convolution(const SpectralFn& u, const OperatorContext& ctx) {
    const int m = ctx.grid_size();
    const Eigen::VectorXd p = probabilities(boltzmann(u, ctx));
    // Kernel modes beyond M/2 - N would alias into the projected modes.
    const int usable = std::min(ctx.kernel().n_modes(), m / 2 - ctx.n_trunc() - 1);
    const KernelSpec kernel = ctx.kernel().truncated(std::max(usable, ctx.n_trunc()));
    std::vector<double> kernel_on_grid(static_cast<std::size_t>(m));
    for (int d = 0; d < m; ++d) {
        kernel_on_grid[d] = eval_kernel(kernel, grid_node(d, m));
    }
    std::vector<double> conv(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (int j = 0; j < m; ++j) {
            s += kernel_on_grid[((i - j) % m + m) % m] * p[j];
        }
        conv[i] = s;
    }
    SpectralFn projected = analyze(conv, ctx.n_trunc());
    return projected.with_grid_size(ctx.grid_size());
}

SpectralFn residual(const SpectralFn& u, const OperatorContext& ctx) {
    if (ctx.lambda() == 0.0) {
        require_level(u, ctx);
        return u;
    }
    const SpectralFn g = gamma(u, ctx);
    return ctx.function(u.coeffs() - ctx.lambda() * g.coeffs());
}

Eigen::MatrixXd jacobian(const SpectralFn& u, const OperatorContext& ctx) {
    const Eigen::VectorXd p = probabilities(boltzmann(u, ctx));
    const Eigen::MatrixXd& table = ctx.table().values();
    const Eigen::VectorXd c = table * p;
    const Eigen::MatrixXd weighted = table * p.asDiagonal();
    const Eigen::MatrixXd second = weighted * table.transpose();
    Eigen::MatrixXd a = c * c.transpose() - second;
    const Eigen::VectorXd k = kernel_row(ctx);
    return a * k.asDiagonal();  // column m scaled by k_m
}

Eigen::MatrixXd residual_jacobian(const SpectralFn& u, const OperatorContext& ctx) {
    const int n = ctx.n_trunc();
    if (ctx.lambda() == 0.0) {
        require_level(u, ctx);
        return Eigen::MatrixXd::Identity(n, n);
    }
    return Eigen::MatrixXd::Identity(n, n) - ctx.lambda() * jacobian(u, ctx).transpose();
}

Eigen::VectorXd finite_rank_x(const SpectralFn& u, const OperatorContext& ctx) {
    return residual(u, ctx).coeffs();
}

Eigen::VectorXd y_pairing_weights(int n_modes) {
    Eigen::VectorXd w(n_modes);
    for (int k = 1; k <= n_modes; ++k) {
        w[k - 1] = 1.0 + 4.0 * k * k;
    }
    return w;
}

Eigen::VectorXd finite_rank_y(const SpectralFn& u, const OperatorContext& ctx) {
    return y_pairing_weights(ctx.n_trunc()).cwiseProduct(finite_rank_x(u, ctx));
}

GrussReport gruss_check(const SpectralFn& u, const OperatorContext& ctx) {
    const Eigen::MatrixXd a = jacobian(u, ctx);
    GrussReport report{0.0, 1, 1, true};
    for (int m = 1; m <= ctx.n_trunc(); ++m) {
        const double km = std::abs(ctx.kernel().k(m));
        for (int n = 1; n <= ctx.n_trunc(); ++n) {
            const double ratio = std::abs(a(n - 1, m - 1)) / km;
            if (ratio > report.max_ratio) {
                report.max_ratio = ratio;
                report.argmax_n = n;
                report.argmax_m = m;
            }
        }
    }
    report.within_bound = report.max_ratio <= 1.0 + 1e-8;
    return report;
}

BoundCheck check_bounds(const SpectralFn& u, const OperatorContext& ctx, double slack) {
    BoundCheck b{};
    b.sup_norm = sup_norm(u);
    b.apriori_bound = ctx.lambda() * ctx.kernel().sup_norm();
    b.derivative_norm = derivative_l2_norm(u);
    b.regularity_bound = 2.0 * std::numbers::pi * ctx.lambda() * ctx.kernel().deriv_sup_norm();
    b.apriori_ok = b.sup_norm <= b.apriori_bound + slack;
    b.regularity_ok = b.derivative_norm <= b.regularity_bound + slack;
    return b;
}

std::vector<double> level_bifurcation_values(const OperatorContext& ctx) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(ctx.n_trunc()));
    for (int n = 1; n <= ctx.n_trunc(); ++n) {
        out.push_back(-2.0 / ctx.kernel().k(n));
    }
    return out;
}

void guard_bifurcation_band(const OperatorContext& ctx, double band) {
    const auto values = level_bifurcation_values(ctx);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (std::abs(ctx.lambda() - values[i]) < band) {
            std::ostringstream os;
            os.precision(12);
            os << "lambda = " << ctx.lambda() << " is within " << band << " of lambda_" << i + 1
               << " = " << values[i] << " (near-bifurcation refusal)";
            throw NearBifurcation(os.str(), ctx.lambda(), static_cast<int>(i + 1));
        }
    }
}

}  // namespace onsager
