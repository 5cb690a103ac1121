#include "onsager/bifurcation.hpp"

#include "onsager/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace onsager {

namespace {

constexpr double kTrivialGuard = 1e-9;

// Bordered system for the extended unknown x = (c, lambda).
struct Extended {
    Eigen::VectorXd f;       // residual coefficients
    Eigen::MatrixXd jac;     // N x (N + 1): [dF/dc, dF/dlambda]
};

Extended evaluate_extended(const OperatorContext& base, const Eigen::VectorXd& x) {
    const int n = base.n_trunc();
    const double lambda = x[n];
    const OperatorContext ctx = base.with_lambda(std::max(lambda, 0.0));
    const SpectralFn u = ctx.function(x.head(n));
    const SpectralFn g = gamma(u, ctx);
    Extended e;
    e.f = x.head(n) - lambda * g.coeffs();
    e.jac.resize(n, n + 1);
    e.jac.leftCols(n) =
        Eigen::MatrixXd::Identity(n, n) - lambda * jacobian(u, ctx).transpose();
    e.jac.col(n) = -g.coeffs();
    return e;
}

Eigen::VectorXd tangent(const Extended& e, const Eigen::VectorXd& previous) {
    const int n = static_cast<int>(e.f.size());
    Eigen::MatrixXd bordered(n + 1, n + 1);
    bordered.topRows(n) = e.jac;
    bordered.row(n) = previous.transpose();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    rhs[n] = 1.0;
    Eigen::VectorXd t = bordered.partialPivLu().solve(rhs);
    t.normalize();
    if (t.dot(previous) < 0.0) {
        t = -t;
    }
    return t;
}

BranchSample make_sample(const OperatorContext& base, const Eigen::VectorXd& x, int parent_mode,
                         double residual_norm) {
    const int n = base.n_trunc();
    const OperatorContext ctx = base.with_lambda(x[n]);
    SpectralFn u = ctx.function(x.head(n));
    return BranchSample{x[n], sup_norm(u), u.coeff(parent_mode), residual_norm,
                        linearly_stable(u, ctx), u};
}

// Newton on F(c, lambda) = 0 with c_mode pinned to value.
bool seed_point(const OperatorContext& base, int mode, double value, double lambda_guess,
                const ContinuationConfig& cfg, Eigen::VectorXd& x) {
    const int n = base.n_trunc();
    x = Eigen::VectorXd::Zero(n + 1);
    x[mode - 1] = value;
    x[n] = lambda_guess;
    for (int it = 0; it < 4 * cfg.max_corrector_iter; ++it) {
        Extended e;
        try {
            e = evaluate_extended(base, x);
        } catch (const RangeError&) {
            return false;
        }
        if (e.f.norm() < cfg.tol) {
            return true;
        }
        // Replace the pinned column by the lambda column.
        Eigen::MatrixXd a = e.jac.leftCols(n);
        a.col(mode - 1) = e.jac.col(n);
        const Eigen::VectorXd d = a.partialPivLu().solve(-e.f);
        if (!d.allFinite()) {
            return false;
        }
        for (int i = 0; i < n; ++i) {
            if (i == mode - 1) {
                x[n] += d[i];
            } else {
                x[i] += d[i];
            }
        }
    }
    return false;
}

}  // namespace

std::vector<double> bifurcation_points(const KernelSpec& kernel, double lambda_max) {
    std::vector<double> out;
    for (int n = 1; n <= kernel.n_modes(); ++n) {
        const double lambda = -2.0 / kernel.k(n);
        if (lambda <= lambda_max) {
            out.push_back(lambda);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> bifurcation_points_by_determinant(const KernelSpec& kernel, int n_trunc,
                                                      double lambda_lo, double lambda_hi,
                                                      double step, double tol) {
    const OperatorContext ctx(kernel, 0.0, n_trunc);
    const Eigen::MatrixXd a0 = jacobian(ctx.zero(), ctx);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n_trunc, n_trunc);
    auto det = [&](double lambda) { return (id - lambda * a0).partialPivLu().determinant(); };

    std::vector<double> out;
    double prev_l = lambda_lo;
    double prev_d = det(prev_l);
    const auto steps = static_cast<long>(std::ceil((lambda_hi - lambda_lo) / step));
    for (long i = 1; i <= steps; ++i) {
        const double l = std::min(lambda_lo + static_cast<double>(i) * step, lambda_hi);
        const double d = det(l);
        if ((prev_d > 0.0) != (d > 0.0)) {
            double lo = prev_l;
            double hi = l;
            const bool lo_positive = prev_d > 0.0;
            while (hi - lo > tol) {
                const double mid = 0.5 * (lo + hi);
                if ((det(mid) > 0.0) == lo_positive) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push_back(0.5 * (lo + hi));
        }
        prev_l = l;
        prev_d = d;
    }
    return out;
}

TrivialStability trivial_stability(const KernelSpec& kernel, double lambda) {
    TrivialStability out{true, {}, 0.0, 0};
    out.spectrum.reserve(static_cast<std::size_t>(kernel.n_modes()));
    for (int n = 1; n <= kernel.n_modes(); ++n) {
        const double lambda_n = -2.0 / kernel.k(n);
        if (std::abs(lambda - lambda_n) < kTrivialGuard) {
            std::ostringstream os;
            os.precision(12);
            os << "lambda = " << lambda << " coincides with lambda_" << n << " = " << lambda_n
               << ": zero eigenvalue, stability undefined";
            throw NearBifurcation(os.str(), lambda, n);
        }
        out.spectrum.push_back(1.0 + lambda * kernel.k(n) / 2.0);
    }
    out.smallest = *std::min_element(out.spectrum.begin(), out.spectrum.end());
    out.negative_count = static_cast<int>(
        std::count_if(out.spectrum.begin(), out.spectrum.end(), [](double e) { return e < 0.0; }));
    out.stable = out.negative_count == 0;
    return out;
}

ZeroEigenvalueCertificate zero_eigenvalue_certificate(const OperatorContext& ctx_template, int mode) {
    const int n = ctx_template.n_trunc();
    const double lambda_n = -2.0 / ctx_template.kernel().k(mode);
    const Eigen::MatrixXd a0 = jacobian(ctx_template.zero(), ctx_template);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    ZeroEigenvalueCertificate cert{};
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(id - lambda_n * a0);
    cert.sigma_min = svd.singularValues()[n - 1];

    const double delta = 1e-4 * lambda_n;
    auto spectrum = [&](double lambda) {
        Eigen::EigenSolver<Eigen::MatrixXd> es(id - lambda * a0, false);
        std::vector<double> re;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            re.push_back(es.eigenvalues()[i].real());
        }
        return re;
    };
    const auto below = spectrum(lambda_n - delta);
    const auto above = spectrum(lambda_n + delta);
    const auto negatives = [](const std::vector<double>& v) {
        return std::count_if(v.begin(), v.end(), [](double e) { return e < 0.0; });
    };
    cert.crossing_count = static_cast<int>(std::abs(negatives(above) - negatives(below)));
    return cert;
}

bool linearly_stable(const SpectralFn& u, const OperatorContext& ctx) {
    const Eigen::MatrixXd lin = residual_jacobian(u, ctx);
    Eigen::EigenSolver<Eigen::MatrixXd> es(lin, false);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        if (!(es.eigenvalues()[i].real() > 0.0)) {
            return false;
        }
    }
    return true;
}

Branch continue_branch(const OperatorContext& ctx_template, int parent_mode, int sign,
                       double lambda_end, const ContinuationConfig& cfg) {
    const int n = ctx_template.n_trunc();
    if (parent_mode < 1 || parent_mode > n) {
        throw std::invalid_argument("parent mode must be in [1, N]");
    }
    if (sign != 1 && sign != -1) {
        throw std::invalid_argument("branch sign must be +1 or -1");
    }
    Branch branch;
    branch.parent_mode = parent_mode;
    branch.sign = sign;
    const double lambda_n = -2.0 / ctx_template.kernel().k(parent_mode);

    // Seed on the kernel direction phi_n, halving eps on corrector failure.
    Eigen::VectorXd x;
    double eps = cfg.seed_eps;
    bool seeded = false;
    for (int h = 0; h <= cfg.seed_halvings && !seeded; ++h, eps *= 0.5) {
        seeded = seed_point(ctx_template, parent_mode, sign * eps, lambda_n, cfg, x);
    }
    if (!seeded) {
        branch.failure = "seed corrector failed for every eps";
        return branch;
    }
    Extended e = evaluate_extended(ctx_template, x);
    branch.samples.push_back(make_sample(ctx_template, x, parent_mode, e.f.norm()));

    Eigen::VectorXd prev_tangent = Eigen::VectorXd::Zero(n + 1);
    prev_tangent[parent_mode - 1] = sign;
    Eigen::VectorXd t = tangent(e, prev_tangent);
    double ds = std::min(cfg.ds, cfg.ds_max);

    while (static_cast<int>(branch.samples.size()) < cfg.max_samples) {
        if (x[n] >= lambda_end) {
            branch.complete = true;
            break;
        }
        bool accepted = false;
        Eigen::VectorXd y;
        int iters = 0;
        double rn = 0.0;
        while (!accepted) {
            if (ds < cfg.ds_min) {
                std::ostringstream os;
                os << "step size fell below " << cfg.ds_min << " at lambda = " << x[n];
                branch.failure = os.str();
                return branch;
            }
            y = x + ds * t;
            bool converged = false;
            for (iters = 1; iters <= cfg.max_corrector_iter; ++iters) {
                Extended ey;
                try {
                    ey = evaluate_extended(ctx_template, y);
                } catch (const RangeError&) {
                    break;
                }
                const double constraint = t.dot(y - x) - ds;
                rn = ey.f.norm();
                if (rn < cfg.tol && std::abs(constraint) < cfg.tol) {
                    converged = true;
                    break;
                }
                Eigen::VectorXd rhs(n + 1);
                rhs.head(n) = -ey.f;
                rhs[n] = -constraint;
                Eigen::MatrixXd bordered(n + 1, n + 1);
                bordered.topRows(n) = ey.jac;
                bordered.row(n) = t.transpose();
                const Eigen::VectorXd d = bordered.partialPivLu().solve(rhs);
                if (!d.allFinite()) {
                    break;
                }
                y += d;
            }
            if (converged && (y - x).norm() <= cfg.ds_max) {
                accepted = true;
            } else {
                ds *= 0.5;
            }
        }

        if (y[n] > lambda_end) {
            // Land on lambda_end: interpolate, then Newton at fixed lambda.
            const double s = (lambda_end - x[n]) / (y[n] - x[n]);
            Eigen::VectorXd z = x + s * (y - x);
            z[n] = lambda_end;
            bool landed = false;
            for (int it = 0; it < cfg.max_corrector_iter; ++it) {
                const Extended ez = evaluate_extended(ctx_template, z);
                rn = ez.f.norm();
                if (rn < cfg.tol) {
                    landed = true;
                    break;
                }
                z.head(n) -= ez.jac.leftCols(n).partialPivLu().solve(ez.f);
            }
            if (landed) {
                branch.samples.push_back(make_sample(ctx_template, z, parent_mode, rn));
            }
            branch.complete = true;
            break;
        }
        Extended ey = evaluate_extended(ctx_template, y);
        const Eigen::VectorXd t_new = tangent(ey, t);
        if ((t_new[n] > 0.0) != (t[n] > 0.0) && branch.samples.size() > 1) {
            branch.fold_detected = true;
            branch.fold_lambdas.push_back(y[n]);
        }
        x = y;
        t = t_new;
        branch.samples.push_back(make_sample(ctx_template, x, parent_mode, rn));
        if (iters <= 3) {
            ds = std::min(1.5 * ds, cfg.ds_max);
        }
    }
    return branch;
}

SpectralFn quarter_rotation(const SpectralFn& u, int parent_mode) {
    Eigen::VectorXd c = u.coeffs();
    const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
    for (int m = 1; m <= u.n_modes(); ++m) {
        if (m % parent_mode != 0) {
            if (std::abs(c[m - 1]) > 1e-8 * scale) {
                throw std::invalid_argument(
                    "quarter_rotation: function has modes outside the parent-mode subspace");
            }
            c[m - 1] = 0.0;
        } else if ((m / parent_mode) % 2 == 1) {
            c[m - 1] = -c[m - 1];
        }
    }
    return u.with_coeffs(std::move(c));
}

PitchforkFit pitchfork_fit(const Branch& branch, double lambda_n, int count) {
    const int k = std::min<int>(count, static_cast<int>(branch.samples.size()));
    if (k < 3) {
        throw std::invalid_argument("pitchfork_fit needs at least three samples");
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    double lx = 0, ly = 0, lxx = 0, lxy = 0;
    int logs = 0;
    for (int i = 0; i < k; ++i) {
        const auto& s = branch.samples[i];
        const double x = s.lambda - lambda_n;
        const double y = s.amplitude * s.amplitude;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        if (x > 0.0 && s.amplitude > 0.0) {
            const double a = std::log(x);
            const double b = std::log(s.amplitude);
            lx += a;
            ly += b;
            lxx += a * a;
            lxy += a * b;
            ++logs;
        }
    }
    PitchforkFit fit{};
    fit.samples = k;
    const double cov = sxy - sx * sy / k;
    const double varx = sxx - sx * sx / k;
    const double vary = syy - sy * sy / k;
    fit.slope = cov / varx;
    fit.intercept = (sy - fit.slope * sx) / k;
    fit.r_squared = vary > 0.0 ? cov * cov / (varx * vary) : 1.0;
    fit.exponent = logs >= 2 ? (lxy - lx * ly / logs) / (lxx - lx * lx / logs)
                             : std::numeric_limits<double>::quiet_NaN();
    return fit;
}

BifurcationDiagram assemble_diagram(const OperatorContext& ctx_template, double lambda_max,
                                    const ContinuationConfig& cfg, int trivial_samples) {
    if (!(lambda_max > 0.0)) {
        throw std::invalid_argument("lambda_max must be positive");
    }
    BifurcationDiagram d;
    d.n_trunc = ctx_template.n_trunc();
    d.grid_size = ctx_template.grid_size();
    d.lambda_max = lambda_max;
    const KernelSpec& kernel = ctx_template.kernel();
    d.lambda_points = bifurcation_points(kernel, lambda_max);

    for (int i = 0; i < trivial_samples; ++i) {
        const double lambda = lambda_max * i / std::max(1, trivial_samples - 1);
        try {
            d.trivial_branch.push_back({lambda, trivial_stability(kernel, lambda).stable});
        } catch (const NearBifurcation&) {
            // grid point on a bifurcation value: no stability label there
        }
    }

    for (int mode = 1; mode <= kernel.n_modes(); ++mode) {
        if (-2.0 / kernel.k(mode) > lambda_max) {
            break;
        }
        if (mode > ctx_template.n_trunc()) {
            d.complete = false;
            d.notes.push_back("bifurcation from mode " + std::to_string(mode) +
                              " lies below lambda_max but beyond the Galerkin level");
            continue;
        }
        for (int sign : {1, -1}) {
            Branch b = continue_branch(ctx_template, mode, sign, lambda_max, cfg);
            if (!b.complete) {
                d.complete = false;
                d.notes.push_back("branch mode " + std::to_string(mode) + (sign > 0 ? "+" : "-") +
                                  " incomplete: " + b.failure);
            }
            d.branches.push_back(std::move(b));
        }
    }
    return d;
}

}  // namespace onsager
