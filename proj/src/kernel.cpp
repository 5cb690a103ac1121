#include "onsager/kernel.hpp"

#include "onsager/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace onsager {

namespace {

constexpr double kDegenerateGap = 1e-12;
constexpr int kQuadraturePanels = 64;

void validate(const std::vector<double>& k, double sup_norm, double deriv_sup_norm,
              std::vector<std::string>& warnings) {
    if (k.empty()) {
        throw KernelInvariantError("kernel needs at least one mode");
    }
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (!std::isfinite(k[i]) || !(k[i] < 0.0)) {
            std::ostringstream os;
            os << "kernel invariant violated: k_" << i + 1 << " = " << k[i] << " is not < 0";
            throw KernelInvariantError(os.str());
        }
    }
    for (std::size_t i = 0; i + 1 < k.size(); ++i) {
        if (!(k[i] < k[i + 1])) {
            std::ostringstream os;
            os << "kernel invariant violated: k_" << i + 1 << " = " << k[i] << " is not < k_"
               << i + 2 << " = " << k[i + 1];
            throw KernelInvariantError(os.str());
        }
        if (k[i + 1] - k[i] < kDegenerateGap) {
            std::ostringstream os;
            os << "near-degenerate gap between k_" << i + 1 << " and k_" << i + 2;
            warnings.push_back(os.str());
        }
    }
    if (!(sup_norm > 0.0) || !std::isfinite(sup_norm)) {
        throw KernelInvariantError("kernel sup_norm must be positive and finite");
    }
    if (!std::isfinite(deriv_sup_norm) || deriv_sup_norm < 0.0) {
        throw KernelInvariantError("kernel deriv_sup_norm must be finite and nonnegative");
    }
}

double series(const std::vector<double>& k, double theta) {
    double s = 0.0;
    for (std::size_t n = 0; n < k.size(); ++n) {
        s += k[n] * std::cos(2.0 * static_cast<double>(n + 1) * theta);
    }
    return s;
}

double series_derivative(const std::vector<double>& k, double theta) {
    double s = 0.0;
    for (std::size_t n = 0; n < k.size(); ++n) {
        const double w = 2.0 * static_cast<double>(n + 1);
        s -= k[n] * w * std::sin(w * theta);
    }
    return s;
}

}  // namespace

KernelSpec::KernelSpec(std::vector<double> coeffs, double sup_norm, double deriv_sup_norm,
                       std::string label)
    : coeffs_(std::move(coeffs)),
      sup_norm_(sup_norm),
      deriv_sup_norm_(deriv_sup_norm),
      label_(std::move(label)) {
    validate(coeffs_, sup_norm_, deriv_sup_norm_, warnings_);
}

KernelSpec KernelSpec::from_series(std::vector<double> coeffs, std::string label) {
    // Validate signs before spending time on the norms.
    std::vector<std::string> ignored;
    validate(coeffs, 1.0, 0.0, ignored);
    const double sup = dense_sup([&](double t) { return series(coeffs, t); }, 0.0, std::numbers::pi);
    const double dsup =
        dense_sup([&](double t) { return series_derivative(coeffs, t); }, 0.0, std::numbers::pi);
    return KernelSpec(std::move(coeffs), sup, dsup, std::move(label));
}

KernelSpec KernelSpec::truncated(int n_modes) const {
    if (n_modes < 1 || n_modes > this->n_modes()) {
        throw std::invalid_argument("truncation level out of range");
    }
    return KernelSpec(std::vector<double>(coeffs_.begin(), coeffs_.begin() + n_modes), sup_norm_,
                      deriv_sup_norm_, label_);
}

double onsager_kernel_exact(double theta) { return std::abs(std::sin(theta)) - 2.0 / std::numbers::pi; }

double onsager_kernel_exact_derivative(double theta) {
    const double s = std::sin(theta);
    if (s == 0.0) {
        return 0.0;
    }
    return s > 0.0 ? std::cos(theta) : -std::cos(theta);
}

double onsager_coefficient(int mode) {
    // The kernel is pi-periodic and smooth on (0, pi); its kinks sit on the
    // panel endpoints, so Gauss-Legendre converges spectrally on each panel.
    using Gauss = boost::math::quadrature::gauss<double, 20>;
    const double w = 2.0 * mode;
    const double h = std::numbers::pi / kQuadraturePanels;
    double s = 0.0;
    for (int p = 0; p < kQuadraturePanels; ++p) {
        s += Gauss::integrate(
            [w](double t) { return onsager_kernel_exact(t) * std::cos(w * t); }, p * h,
            (p + 1) * h);
    }
    return 2.0 * s / std::numbers::pi;
}

KernelSpec onsager_kernel(int n_modes) {
    if (n_modes < 1) {
        throw std::invalid_argument("onsager_kernel: n_modes must be >= 1");
    }
    std::vector<double> k(static_cast<std::size_t>(n_modes));
    for (int n = 1; n <= n_modes; ++n) {
        k[n - 1] = onsager_coefficient(n);
    }
    const double sup = dense_sup(onsager_kernel_exact, 0.0, 2.0 * std::numbers::pi);
    const double dsup = dense_sup(onsager_kernel_exact_derivative, 0.0, 2.0 * std::numbers::pi);
    return KernelSpec(std::move(k), sup, dsup, "onsager:" + std::to_string(n_modes));
}

double eval_kernel(const KernelSpec& spec, double theta) { return series(spec.coeffs(), theta); }

double eval_kernel_derivative(const KernelSpec& spec, double theta) {
    return series_derivative(spec.coeffs(), theta);
}

KernelNorms kernel_norms(const KernelSpec& spec) { return {spec.sup_norm(), spec.deriv_sup_norm()}; }

double dense_sup(const std::function<double(double)>& f, double a, double b, int points) {
    const double h = (b - a) / points;
    double best = -1.0;
    double best_x = a;
    for (int j = 0; j <= points; ++j) {
        const double x = a + h * j;
        const double v = std::abs(f(x));
        if (v > best) {
            best = v;
            best_x = x;
        }
    }
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = std::max(a, best_x - h);
    double hi = std::min(b, best_x + h);
    double x1 = hi - phi * (hi - lo);
    double x2 = lo + phi * (hi - lo);
    double f1 = std::abs(f(x1));
    double f2 = std::abs(f(x2));
    for (int it = 0; it < 80; ++it) {
        if (f1 > f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = std::abs(f(x1));
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = std::abs(f(x2));
        }
    }
    return std::max({best, f1, f2});
}

KernelSpec kernel_from_json(const nlohmann::json& j) {
    if (!j.contains("coeffs") || !j.at("coeffs").is_array()) {
        throw std::invalid_argument("kernel JSON needs a \"coeffs\" array");
    }
    auto k = j.at("coeffs").get<std::vector<double>>();
    const std::string label = j.value("label", std::string("custom"));
    if (j.contains("sup_norm") && j.contains("deriv_sup_norm")) {
        return KernelSpec(std::move(k), j.at("sup_norm").get<double>(),
                          j.at("deriv_sup_norm").get<double>(), label);
    }
    return KernelSpec::from_series(std::move(k), label);
}

nlohmann::json kernel_to_json(const KernelSpec& spec) {
    return {{"label", spec.label()},
            {"coeffs", spec.coeffs()},
            {"sup_norm", spec.sup_norm()},
            {"deriv_sup_norm", spec.deriv_sup_norm()}};
}

KernelSpec kernel_from_selector(const std::string& selector) {
    const auto colon = selector.find(':');
    const std::string kind = selector.substr(0, colon);
    const std::string arg = colon == std::string::npos ? std::string() : selector.substr(colon + 1);
    if (kind == "onsager") {
        int n = 32;
        if (!arg.empty()) {
            std::size_t used = 0;
            n = std::stoi(arg, &used);
            if (used != arg.size() || n < 1) {
                throw std::invalid_argument("bad mode count in kernel selector: " + selector);
            }
        }
        return onsager_kernel(n);
    }
    if (kind == "file") {
        std::ifstream in(arg);
        if (!in) {
            throw std::runtime_error("cannot open kernel file: " + arg);
        }
        nlohmann::json j;
        in >> j;
        KernelSpec spec = kernel_from_json(j);
        return spec;
    }
    throw std::invalid_argument("unknown kernel selector: " + selector);
}

}  // namespace onsager
