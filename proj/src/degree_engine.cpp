#include "onsager/degree_engine.hpp"

#include "onsager/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace onsager {

namespace {

constexpr int kBoundarySamples = 64;
constexpr double kBoundaryTol = 1e-8;
constexpr double kSingularRatio = 1e-10;
constexpr int kPolishIters = 4;
constexpr int kStagnationIters = 12;

// The finite-rank map in the chosen pairing, on raw coefficient vectors.
class FiniteRankMap {
public:
    FiniteRankMap(const OperatorContext& ctx, Pairing pairing)
        : ctx_(ctx), weights_(pairing == Pairing::Y ? y_pairing_weights(ctx.n_trunc())
                                                    : Eigen::VectorXd::Ones(ctx.n_trunc())) {}

    Eigen::VectorXd value(const Eigen::VectorXd& c) const {
        return weights_.cwiseProduct(finite_rank_x(ctx_.function(c), ctx_));
    }
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& c) const {
        return weights_.asDiagonal() * residual_jacobian(ctx_.function(c), ctx_);
    }

private:
    const OperatorContext& ctx_;
    Eigen::VectorXd weights_;
};

struct NewtonOutcome {
    bool converged = false;
    Eigen::VectorXd x;
    double residual_norm = std::numeric_limits<double>::infinity();
};

// Gradient of log m(x) for the deflation operator m(x) = prod (|x - r|^-2 + 1).
Eigen::VectorXd deflation_log_gradient(const Eigen::VectorXd& x,
                                       const std::vector<Eigen::VectorXd>& roots) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
    for (const auto& r : roots) {
        const Eigen::VectorXd d = x - r;
        const double d2 = d.squaredNorm();
        if (d2 == 0.0) {
            continue;
        }
        const double inv = 1.0 / d2;
        g += (-2.0 * inv * inv / (inv + 1.0)) * d;
    }
    return g;
}

NewtonOutcome deflated_newton(const FiniteRankMap& map, Eigen::VectorXd x,
                              const std::vector<Eigen::VectorXd>& roots,
                              const MultistartConfig& cfg, double step_cap, double escape_radius) {
    NewtonOutcome out;
    double best = std::numeric_limits<double>::infinity();
    int since_best = 0;
    for (int it = 0; it < cfg.max_iter; ++it) {
        Eigen::VectorXd f;
        Eigen::MatrixXd jac;
        try {
            f = map.value(x);
            const double fn = f.norm();
            if (fn < cfg.newton_tol) {
                out.converged = true;
                out.x = x;
                out.residual_norm = fn;
                return out;
            }
            // Deflated iterates that stop improving are wandering, not converging.
            if (fn < 0.9 * best) {
                best = fn;
                since_best = 0;
            } else if (++since_best > kStagnationIters) {
                return out;
            }
            jac = map.jacobian(x);
        } catch (const RangeError&) {
            return out;
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
        Eigen::VectorXd step = lu.solve(-f);
        if (!step.allFinite()) {
            return out;
        }
        if (!roots.empty()) {
            const double denom = 1.0 - deflation_log_gradient(x, roots).dot(step);
            if (std::abs(denom) < 1e-14) {
                return out;
            }
            step /= denom;
        }
        const double len = step.norm();
        if (len > step_cap) {
            step *= step_cap / len;
        }
        x += step;
        if (!x.allFinite() || x.norm() > escape_radius) {
            return out;
        }
    }
    return out;
}

// Plain Newton steps to push a deflated solution down to roundoff.
void polish(const FiniteRankMap& map, NewtonOutcome& out) {
    for (int it = 0; it < kPolishIters; ++it) {
        const Eigen::VectorXd step = map.jacobian(out.x).partialPivLu().solve(-map.value(out.x));
        const Eigen::VectorXd candidate = out.x + step;
        const double rn = map.value(candidate).norm();
        if (!(rn < out.residual_norm)) {
            break;
        }
        out.x = candidate;
        out.residual_norm = rn;
    }
}

long long quantize(double v) { return std::llround(v * 1e8); }

// Trivial/small zeros first, then by coefficients, descending.
bool canonical_less(const Zero& a, const Zero& b) {
    const long long sa = quantize(a.sup_norm);
    const long long sb = quantize(b.sup_norm);
    if (sa != sb) {
        return sa < sb;
    }
    for (int n = 1; n <= a.u.n_modes(); ++n) {
        const long long qa = quantize(a.u.coeff(n));
        const long long qb = quantize(b.u.coeff(n));
        if (qa != qb) {
            return qa > qb;
        }
    }
    return false;
}

int sign_and_regularity(const Eigen::MatrixXd& jac, const SpectralFn& u) {
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
    const auto& s = svd.singularValues();
    if (s[s.size() - 1] < kSingularRatio * s[0]) {
        std::ostringstream os;
        os << "non-regular zero (sigma_min/sigma_max = " << s[s.size() - 1] / s[0]
           << ") at |u|_inf = " << sup_norm(u) << "; lambda is at or near a bifurcation value";
        throw NonRegularZero(os.str());
    }
    const double det = jac.partialPivLu().determinant();
    return det > 0.0 ? 1 : -1;
}

}  // namespace

const char* to_string(Pairing p) { return p == Pairing::X ? "x" : "y"; }

Domain::Domain(Kind kind, Eigen::VectorXd center, double radius)
    : kind_(kind), center_(std::move(center)), radius_(radius) {
    if (!(radius_ > 0.0) || !std::isfinite(radius_)) {
        throw std::invalid_argument("domain radius must be positive");
    }
}

Domain Domain::sup_ball(double radius) { return Domain(Kind::SupBall, Eigen::VectorXd(), radius); }

Domain Domain::coeff_ball(Eigen::VectorXd center, double radius) {
    return Domain(Kind::CoeffBall, std::move(center), radius);
}

double Domain::level(const SpectralFn& u) const {
    if (kind_ == Kind::SupBall) {
        return sup_norm(u) - radius_;
    }
    if (center_.size() != u.n_modes()) {
        throw std::invalid_argument("domain center dimension mismatch");
    }
    return (u.coeffs() - center_).norm() - radius_;
}

double Domain::bounding_radius(int /*n_modes*/) const {
    // ||c||_2 = ||u||_{L2} <= sqrt(2 pi) ||u||_inf
    return kind_ == Kind::SupBall ? std::sqrt(2.0 * std::numbers::pi) * radius_ : radius_;
}

Eigen::VectorXd Domain::sample_interior(std::mt19937_64& rng, int n_modes) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::VectorXd d(n_modes);
    for (int i = 0; i < n_modes; ++i) {
        d[i] = normal(rng);
    }
    const double r = bounding_radius(n_modes) * std::pow(unit(rng), 1.0 / n_modes);
    Eigen::VectorXd x = d.normalized() * r;
    if (kind_ == Kind::CoeffBall) {
        x += center_;
    }
    return x;
}

Eigen::VectorXd Domain::sample_boundary(std::mt19937_64& rng, int n_modes, int grid_size) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd d(n_modes);
    for (int i = 0; i < n_modes; ++i) {
        d[i] = normal(rng);
    }
    d.normalize();
    if (kind_ == Kind::CoeffBall) {
        return center_ + radius_ * d;
    }
    return d * (radius_ / sup_norm(SpectralFn(d, grid_size)));
}

double apriori_radius(const OperatorContext& ctx, double margin) {
    return ctx.lambda() * ctx.kernel().sup_norm() + margin;
}

int jacobian_sign(const SpectralFn& u, const OperatorContext& ctx) {
    return sign_and_regularity(residual_jacobian(u, ctx), u);
}

ZeroSearch find_zeros(const OperatorContext& ctx, const Domain& domain, const MultistartConfig& cfg,
                      Pairing pairing) {
    if (cfg.newton_tol <= 0.0) {
        throw std::invalid_argument("newton_tol must be positive");
    }
    guard_bifurcation_band(ctx);
    const int n = ctx.n_trunc();
    const FiniteRankMap map(ctx, pairing);
    std::mt19937_64 rng(cfg.seed);

    const double bound = domain.bounding_radius(n);
    const double step_cap = std::max(1.0, 0.5 * bound);
    const double escape = 10.0 * bound + (domain.kind() == Domain::Kind::CoeffBall
                                              ? domain.center().norm()
                                              : 0.0);

    ZeroSearch search;
    search.starts = cfg.starts_for(n);
    std::vector<Eigen::VectorXd> roots;  // deflation set, interior and exterior
    std::vector<bool> interior;
    std::vector<Zero> found;
    std::vector<int> found_index;  // roots[i] -> index into found, or -1

    for (int s = 0; s < search.starts; ++s) {
        const Eigen::VectorXd start = domain.sample_interior(rng, n);
        NewtonOutcome out = deflated_newton(map, start, roots, cfg, step_cap, escape);
        if (!out.converged) {
            ++search.failed_starts;
            continue;
        }
        polish(map, out);

        int duplicate = -1;
        for (std::size_t i = 0; i < roots.size(); ++i) {
            if ((roots[i] - out.x).norm() < cfg.deflation_radius) {
                duplicate = static_cast<int>(i);
                break;
            }
        }
        if (duplicate >= 0) {
            if (found_index[duplicate] >= 0) {
                ++found[found_index[duplicate]].hits;
            } else {
                ++search.exterior_hits;
            }
            continue;
        }

        const SpectralFn u = ctx.function(out.x);
        const double lvl = domain.level(u);
        roots.push_back(out.x);
        if (std::abs(lvl) <= kBoundaryTol * std::max(1.0, domain.radius())) {
            std::ostringstream os;
            os << "zero on the domain boundary (level " << lvl << ", radius " << domain.radius()
               << ")";
            throw BoundaryZero(os.str());
        }
        if (lvl > 0.0) {
            found_index.push_back(-1);
            ++search.exterior_zeros;
            ++search.exterior_hits;
            continue;
        }
        const int sign = sign_and_regularity(map.jacobian(out.x), u);
        found_index.push_back(static_cast<int>(found.size()));
        found.push_back(Zero{u, sign, out.residual_norm, sup_norm(u), 1});
    }

    std::sort(found.begin(), found.end(), canonical_less);
    search.zeros = std::move(found);
    return search;
}

ZeroSearch find_zeros(const OperatorContext& ctx, double radius, const MultistartConfig& cfg) {
    return find_zeros(ctx, Domain::sup_ball(radius), cfg, Pairing::X);
}

DegreeReport brouwer_degree(const OperatorContext& ctx, const Domain& domain,
                            const MultistartConfig& cfg, Pairing pairing) {
    ZeroSearch search = find_zeros(ctx, domain, cfg, pairing);

    DegreeReport report;
    report.level = ctx.n_trunc();
    report.grid_size = ctx.grid_size();
    report.lambda = ctx.lambda();
    report.pairing = pairing;
    report.domain_kind = domain.kind();
    report.domain_radius = domain.radius();
    report.n_starts = search.starts;
    report.seed = cfg.seed;
    report.newton_tol = cfg.newton_tol;
    report.failed_starts = search.failed_starts;
    report.exterior_hits = search.exterior_hits;
    report.zeros = std::move(search.zeros);
    for (const auto& z : report.zeros) {
        report.degree += z.jacobian_sign;
    }

    const FiniteRankMap map(ctx, pairing);
    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    double margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kBoundarySamples; ++i) {
        const Eigen::VectorXd x = domain.sample_boundary(rng, ctx.n_trunc(), ctx.grid_size());
        try {
            margin = std::min(margin, map.value(x).norm());
        } catch (const RangeError&) {
            margin = 0.0;
            report.reasons.push_back("boundary sample exceeded the exponent guard");
            break;
        }
    }
    report.boundary_margin = margin;

    double sep = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < report.zeros.size(); ++i) {
        for (std::size_t j = i + 1; j < report.zeros.size(); ++j) {
            sep = std::min(sep, (report.zeros[i].u.coeffs() - report.zeros[j].u.coeffs()).norm());
        }
    }
    report.min_separation = sep;

    const double tol = cfg.newton_tol;
    if (!(margin > 10.0 * tol)) {
        report.reasons.push_back("boundary margin below 10x the zero-finder tolerance");
    }
    if (!(sep > 10.0 * tol)) {
        report.reasons.push_back("zero separation below 10x the zero-finder tolerance");
    }
    if (domain.kind() == Domain::Kind::SupBall &&
        domain.radius() > ctx.lambda() * ctx.kernel().sup_norm()) {
        report.matches_global_degree = report.degree == 1;
        if (report.degree != 1) {
            report.reasons.push_back("degree differs from the global homotopy value 1; the zero "
                                     "list is probably incomplete");
        }
    }
    report.certified = report.reasons.empty();
    return report;
}

DegreeReport brouwer_degree(const OperatorContext& ctx, double radius, const MultistartConfig& cfg,
                            Pairing pairing) {
    return brouwer_degree(ctx, Domain::sup_ball(radius), cfg, pairing);
}

StabilizationTable degree_stabilization(const KernelSpec& kernel, double lambda, double radius_margin,
                                        const MultistartConfig& cfg, int n_lo, int n_hi,
                                        Pairing pairing) {
    if (n_lo < 1 || n_hi < n_lo) {
        throw std::invalid_argument("degree_stabilization: bad level range");
    }
    StabilizationTable table;
    table.lambda = lambda;
    table.radius_margin = radius_margin;
    for (int n = n_lo; n <= n_hi; ++n) {
        const OperatorContext ctx(kernel, lambda, n);
        const DegreeReport r = brouwer_degree(ctx, apriori_radius(ctx, radius_margin), cfg, pairing);
        table.rows.push_back({n, ctx.grid_size(), r.degree, static_cast<int>(r.zeros.size()),
                              r.certified});
    }
    const int last = table.rows.back().degree;
    table.stable_from = table.rows.back().level;
    for (auto it = table.rows.rbegin(); it != table.rows.rend() && it->degree == last; ++it) {
        table.stable_from = it->level;
    }
    table.constant = table.stable_from == n_lo;
    return table;
}

DecompositionReport domain_decomposition_check(const OperatorContext& ctx, double radius,
                                               const MultistartConfig& cfg) {
    DecompositionReport out;
    const DegreeReport total = brouwer_degree(ctx, radius, cfg);
    out.total_degree = total.degree;

    const int n = ctx.n_trunc();
    const double sup_per_coeff = std::sqrt(n / std::numbers::pi);  // ||u||_inf <= this * ||c||_2
    std::vector<Domain> parts;
    for (const auto& z : total.zeros) {
        double r = (radius - z.sup_norm) / sup_per_coeff * 0.5;
        if (std::isfinite(total.min_separation)) {
            r = std::min(r, 0.25 * total.min_separation);
        }
        r = std::min(r, 1.0);
        parts.push_back(Domain::coeff_ball(z.u.coeffs(), r));
        out.sub_radii.push_back(r);
    }

    MultistartConfig sub_cfg = cfg;
    sub_cfg.n_starts = std::max(8, cfg.starts_for(n) / 8);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        sub_cfg.seed = cfg.seed + 2 + i;
        const DegreeReport sub = brouwer_degree(ctx, parts[i], sub_cfg);
        out.sub_degrees.push_back(sub.degree);
    }

    // Remainder: independent search over the whole domain, keeping zeros
    // outside every sub-ball.
    MultistartConfig rest_cfg = cfg;
    rest_cfg.seed = cfg.seed + 1;
    const ZeroSearch rest = find_zeros(ctx, Domain::sup_ball(radius), rest_cfg);
    for (const auto& z : rest.zeros) {
        bool covered = false;
        for (const auto& p : parts) {
            covered = covered || p.level(z.u) < 0.0;
        }
        if (!covered) {
            ++out.remainder_zeros;
            out.remainder_degree += z.jacobian_sign;
        }
    }

    int sum = out.remainder_degree;
    for (int d : out.sub_degrees) {
        sum += d;
    }
    out.consistent = sum == out.total_degree && out.remainder_degree == 0;
    return out;
}

HomotopyReport convex_homotopy_check(const OperatorContext& ctx, double radius,
                                     const MultistartConfig& cfg, int n_steps) {
    if (n_steps < 2) {
        throw std::invalid_argument("convex_homotopy_check needs at least two steps");
    }
    HomotopyReport out;
    out.radius = radius;
    std::vector<double> ts;
    for (int i = 0; i < n_steps; ++i) {
        ts.push_back(static_cast<double>(i) / (n_steps - 1));
    }
    // Admissibility is checked for the whole grid before any work is done.
    for (double t : ts) {
        try {
            guard_bifurcation_band(ctx.with_lambda(t * ctx.lambda()));
        } catch (const NearBifurcation& e) {
            std::ostringstream os;
            os << "homotopy step t = " << t << ": " << e.what();
            throw NearBifurcation(os.str(), e.lambda(), e.mode());
        }
    }
    for (double t : ts) {
        const OperatorContext step_ctx = ctx.with_lambda(t * ctx.lambda());
        try {
            const DegreeReport r = brouwer_degree(step_ctx, radius, cfg);
            out.rows.push_back({t, step_ctx.lambda(), r.degree, r.certified});
        } catch (const BoundaryZero& e) {
            std::ostringstream os;
            os << "homotopy not admissible at t = " << t << ": " << e.what();
            throw BoundaryZero(os.str(), t);
        }
    }
    out.constant = std::all_of(out.rows.begin(), out.rows.end(),
                               [&](const HomotopyRow& r) { return r.degree == out.rows.front().degree; });
    return out;
}

}  // namespace onsager
