#pragma once

#include "onsager/onsager_map.hpp"

#include <string>
#include <vector>

namespace onsager {

/// lambda_n = -2 / k_n for every stored kernel mode with lambda_n <= lambda_max,
/// ascending.
std::vector<double> bifurcation_points(const KernelSpec& kernel, double lambda_max);

/// Independent route: sign changes of det(Id - lambda a(0)) on a lambda grid
/// (a(0) by quadrature at level n_trunc), refined by bisection to tol.
std::vector<double> bifurcation_points_by_determinant(const KernelSpec& kernel, int n_trunc,
                                                      double lambda_lo, double lambda_hi,
                                                      double step = 1e-3, double tol = 1e-9);

struct TrivialStability {
    bool stable;
    std::vector<double> spectrum;  // 1 + lambda k_n / 2, n = 1..n_modes
    double smallest;
    int negative_count;
};

/// Stability of u = 0 from the spectrum of Id - lambda a(0). Refuses
/// (NearBifurcation) within 1e-9 of a bifurcation value.
TrivialStability trivial_stability(const KernelSpec& kernel, double lambda);

struct ZeroEigenvalueCertificate {
    double sigma_min;   // smallest singular value of Id - lambda_n a(0)
    int crossing_count; // eigenvalues changing sign across lambda_n
};

ZeroEigenvalueCertificate zero_eigenvalue_certificate(const OperatorContext& ctx_template, int mode);

struct ContinuationConfig {
    double seed_eps = 1e-2;
    int seed_halvings = 6;
    double ds = 0.05;
    double ds_max = 0.2;
    double ds_min = 1e-6;
    double tol = 1e-10;
    int max_corrector_iter = 12;
    int max_samples = 4000;
};

struct BranchSample {
    double lambda;
    double amplitude;  // ||u||_inf
    double leading;    // coefficient of the parent mode
    double residual_norm;
    bool stable;       // all eigenvalues of Id - lambda a(u) have positive real part
    SpectralFn u;
};

struct Branch {
    int parent_mode = 0;
    int sign = 1;  // seed direction +/- eps phi_n
    std::vector<BranchSample> samples;
    bool fold_detected = false;
    std::vector<double> fold_lambdas;
    bool complete = false;  // reached lambda_end without step failure
    std::string failure;    // StepFailure description for partial branches
};

/// Stability label of a solution from the linearization spectrum.
bool linearly_stable(const SpectralFn& u, const OperatorContext& ctx);

/// Pseudo-arclength continuation of the branch bifurcating from (lambda_n, 0)
/// in direction sign * phi_n, up to lambda_end. Lambda in ctx_template is ignored.
Branch continue_branch(const OperatorContext& ctx_template, int parent_mode, int sign,
                       double lambda_end, const ContinuationConfig& cfg = {});

/// Rotation theta -> theta + pi/(2n): the phi_m coefficient flips sign when
/// m/n is odd. Only defined on functions built from multiples of mode n.
SpectralFn quarter_rotation(const SpectralFn& u, int parent_mode);

struct PitchforkFit {
    double slope;      // amplitude^2 ~ slope (lambda - lambda_n) + intercept
    double intercept;
    double r_squared;
    double exponent;   // log amplitude vs log (lambda - lambda_n) slope, ~1/2
    int samples;
};

PitchforkFit pitchfork_fit(const Branch& branch, double lambda_n, int count = 10);

struct TrivialSample {
    double lambda;
    bool stable;
};

struct BifurcationDiagram {
    int n_trunc = 0;
    int grid_size = 0;
    double lambda_max = 0.0;
    std::vector<double> lambda_points;
    std::vector<TrivialSample> trivial_branch;
    std::vector<Branch> branches;
    bool complete = true;
    std::vector<std::string> notes;
};

BifurcationDiagram assemble_diagram(const OperatorContext& ctx_template, double lambda_max,
                                    const ContinuationConfig& cfg = {}, int trivial_samples = 201);

}  // namespace onsager
