#pragma once

#include "onsager/onsager_map.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace onsager {

/// Which finite-rank approximation drives the zero search: the L2 pairing
/// (A_n) or the H1 pairing (the tilde-A_n cross-check).
enum class Pairing { X, Y };

const char* to_string(Pairing p);

struct MultistartConfig {
    int n_starts = 0;  // 0 selects 64 N
    std::uint64_t seed = 20240611;
    double newton_tol = 1e-11;
    int max_iter = 80;
    double deflation_radius = 1e-3;

    int starts_for(int n_trunc) const { return n_starts > 0 ? n_starts : 64 * n_trunc; }
};

/// Open set in the Galerkin space Y_N where zeros are counted.
class Domain {
public:
    enum class Kind { SupBall, CoeffBall };

    /// {u : ||u||_inf < radius}
    static Domain sup_ball(double radius);
    /// {u : ||c - center||_2 < radius} in coefficient space
    static Domain coeff_ball(Eigen::VectorXd center, double radius);

    Kind kind() const { return kind_; }
    double radius() const { return radius_; }
    const Eigen::VectorXd& center() const { return center_; }

    /// Negative inside, zero on the boundary, positive outside.
    double level(const SpectralFn& u) const;
    /// Radius of a coefficient ball around center() that contains the domain.
    double bounding_radius(int n_modes) const;

    Eigen::VectorXd sample_interior(std::mt19937_64& rng, int n_modes) const;
    Eigen::VectorXd sample_boundary(std::mt19937_64& rng, int n_modes, int grid_size) const;

private:
    Domain(Kind kind, Eigen::VectorXd center, double radius);

    Kind kind_;
    Eigen::VectorXd center_;
    double radius_;
};

/// lambda ||K||_inf + margin: the sup-norm radius of the default domain.
double apriori_radius(const OperatorContext& ctx, double margin = 0.5);

struct Zero {
    SpectralFn u;
    int jacobian_sign;
    double residual_norm;
    double sup_norm;
    int hits;  // starts that converged here
};

struct ZeroSearch {
    std::vector<Zero> zeros;  // canonical order
    int starts = 0;
    int failed_starts = 0;
    int exterior_hits = 0;  // converged to zeros outside the domain
    int exterior_zeros = 0;
};

/// sign det(Id - lambda a(u)) at level N.
int jacobian_sign(const SpectralFn& u, const OperatorContext& ctx);

/// Multistart Newton with deflation on the chosen finite-rank map.
/// Throws NearBifurcation, NonRegularZero, BoundaryZero.
ZeroSearch find_zeros(const OperatorContext& ctx, const Domain& domain, const MultistartConfig& cfg,
                      Pairing pairing = Pairing::X);
ZeroSearch find_zeros(const OperatorContext& ctx, double radius, const MultistartConfig& cfg);

struct DegreeReport {
    int level = 0;
    int grid_size = 0;
    double lambda = 0.0;
    Pairing pairing = Pairing::X;
    Domain::Kind domain_kind = Domain::Kind::SupBall;
    double domain_radius = 0.0;
    std::vector<Zero> zeros;
    int degree = 0;
    double boundary_margin = 0.0;
    double min_separation = 0.0;  // +inf with fewer than two zeros
    bool certified = false;
    std::vector<std::string> reasons;  // why certification failed
    int n_starts = 0;
    std::uint64_t seed = 0;
    double newton_tol = 0.0;
    int failed_starts = 0;
    int exterior_hits = 0;
    /// Set when the domain contains the a-priori ball, where the degree must be 1.
    std::optional<bool> matches_global_degree;
};

DegreeReport brouwer_degree(const OperatorContext& ctx, const Domain& domain,
                            const MultistartConfig& cfg, Pairing pairing = Pairing::X);
DegreeReport brouwer_degree(const OperatorContext& ctx, double radius, const MultistartConfig& cfg,
                            Pairing pairing = Pairing::X);

struct StabilizationRow {
    int level;
    int grid_size;
    int degree;
    int n_zeros;
    bool certified;
};

struct StabilizationTable {
    double lambda = 0.0;
    double radius_margin = 0.0;
    std::vector<StabilizationRow> rows;
    int stable_from = 0;  // smallest N after which the degree no longer changes
    bool constant = false;
};

/// Degree at levels n_lo..n_hi with the a-priori domain at each level.
StabilizationTable degree_stabilization(const KernelSpec& kernel, double lambda, double radius_margin,
                                        const MultistartConfig& cfg, int n_lo, int n_hi,
                                        Pairing pairing = Pairing::X);

struct DecompositionReport {
    int total_degree = 0;
    std::vector<int> sub_degrees;
    std::vector<double> sub_radii;
    int remainder_degree = 0;
    int remainder_zeros = 0;
    bool consistent = false;  // sum of parts equals the total, remainder is 0
};

/// Splits the domain into coefficient balls around each zero plus the rest.
DecompositionReport domain_decomposition_check(const OperatorContext& ctx, double radius,
                                               const MultistartConfig& cfg);

struct HomotopyRow {
    double t;
    double lambda;
    int degree;
    bool certified;
};

struct HomotopyReport {
    double radius = 0.0;
    std::vector<HomotopyRow> rows;
    bool constant = false;
};

/// Degree of Id - t lambda Gamma on one fixed domain for t on a uniform grid
/// of n_steps points in [0, 1]. Throws NearBifurcation or BoundaryZero
/// naming the offending t.
HomotopyReport convex_homotopy_check(const OperatorContext& ctx, double radius,
                                     const MultistartConfig& cfg, int n_steps);

}  // namespace onsager
