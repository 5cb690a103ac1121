#pragma once

#include <nlohmann/json.hpp>

#include <functional>
#include <string>
#include <vector>

namespace onsager {

struct KernelNorms {
    double sup_norm;
    double deriv_sup_norm;
};

/// Interaction kernel K(theta) = sum_n k_n cos(2 n theta), truncated to
/// n_modes() terms, with the sup norms of the (untruncated) kernel and its
/// derivative. Construction enforces k_n < 0 and k_1 < k_2 < ... .
class KernelSpec {
public:
    KernelSpec(std::vector<double> coeffs, double sup_norm, double deriv_sup_norm,
               std::string label = "custom");

    /// Norms taken from the truncated series itself.
    static KernelSpec from_series(std::vector<double> coeffs, std::string label = "custom");

    int n_modes() const { return static_cast<int>(coeffs_.size()); }
    const std::vector<double>& coeffs() const { return coeffs_; }
    double k(int mode) const { return coeffs_[mode - 1]; }
    double sup_norm() const { return sup_norm_; }
    double deriv_sup_norm() const { return deriv_sup_norm_; }
    /// lambda_0 = 1 / ||K||_inf: below it the trivial solution is the only one.
    double uniqueness_threshold() const { return 1.0 / sup_norm_; }
    const std::string& label() const { return label_; }
    /// Near-degenerate ordering gaps, reported but accepted.
    const std::vector<std::string>& warnings() const { return warnings_; }

    KernelSpec truncated(int n_modes) const;

private:
    std::vector<double> coeffs_;
    double sup_norm_;
    double deriv_sup_norm_;
    std::string label_;
    std::vector<std::string> warnings_;
};

/// |sin theta| - 2/pi and its derivative (defined away from theta = 0, pi).
double onsager_kernel_exact(double theta);
double onsager_kernel_exact_derivative(double theta);

/// (1/pi) int_0^{2pi} (|sin t| - 2/pi) cos(2 n t) dt by composite Gauss-Legendre
/// on the smooth half period.
double onsager_coefficient(int mode);

KernelSpec onsager_kernel(int n_modes);

double eval_kernel(const KernelSpec& spec, double theta);
double eval_kernel_derivative(const KernelSpec& spec, double theta);

KernelNorms kernel_norms(const KernelSpec& spec);

/// max |f| over [a, b] on a uniform grid plus golden-section refinement
/// around the best grid point.
double dense_sup(const std::function<double(double)>& f, double a, double b,
                 int points = 100000);

/// {"coeffs": [...], "sup_norm": x, "deriv_sup_norm": y}; norms optional.
KernelSpec kernel_from_json(const nlohmann::json& j);
nlohmann::json kernel_to_json(const KernelSpec& spec);

/// "onsager:<n_modes>" or "file:<path>".
KernelSpec kernel_from_selector(const std::string& selector);

}  // namespace onsager
