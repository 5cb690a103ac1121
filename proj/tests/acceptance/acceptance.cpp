// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "onsager/bifurcation.hpp"
#include "onsager/degree_engine.hpp"
#include "onsager/errors.hpp"

#include "../support/oracles.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace onsager;
using onsager::testing::kPi;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) {
        ++failures;
    }
    std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str());
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

const KernelSpec& kernel() {
    static const KernelSpec k = onsager_kernel(32);
    return k;
}

MultistartConfig starts(int n) {
    MultistartConfig cfg;
    cfg.n_starts = n;
    return cfg;
}

Outcome bifurcation_points_criterion() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto points = bifurcation_points(kernel(), 25.0);
    const double elapsed = seconds_since(t0);
    if (points.size() != 2) {
        return {false, "expected two points below 25"};
    }
    double worst = 0.0;
    for (int n = 1; n <= 2; ++n) {
        const double quad = -2.0 / testing::onsager_k_quadrature(n, 10000);
        const double closed = testing::onsager_lambda_closed(n);
        worst = std::max({worst, std::abs(points[n - 1] - quad), std::abs(points[n - 1] - closed)});
    }
    const bool ok = std::abs(points[0] - 4.71238898) <= 1e-6 && std::abs(points[1] - 23.5619449) <= 1e-6 &&
                    worst <= 1e-6 && elapsed < 1.0;
    return {ok, fmt("lambda1=%.9f lambda2=%.9f, oracle diff %.1e", points[0], points[1], worst) +
                    fmt(", %.3fs", elapsed)};
}

Outcome uniqueness_criterion() {
    const auto t0 = std::chrono::steady_clock::now();
    std::ostringstream detail;
    bool ok = true;
    for (double lambda : {0.5, 1.0, 1.4}) {
        const OperatorContext ctx(kernel(), lambda, 8);
        const ZeroSearch s = find_zeros(ctx, apriori_radius(ctx), starts(500));
        const bool single = s.zeros.size() == 1 && s.zeros[0].u.coeffs().norm() < 1e-10 &&
                            s.zeros[0].jacobian_sign == 1;
        ok = ok && single;
        detail << "lambda=" << lambda << ":" << s.zeros.size() << " zero(s) ";
    }
    const double elapsed = seconds_since(t0);
    ok = ok && elapsed < 30.0;
    detail << fmt("%.2fs", elapsed);
    return {ok, detail.str()};
}

Outcome degree_constancy_criterion() {
    std::ostringstream detail;
    bool ok = true;
    for (double lambda : {0.5, 1.0, 3.0, 6.0, 10.0}) {
        const OperatorContext ctx(kernel(), lambda, 8);
        const DegreeReport r = brouwer_degree(ctx, apriori_radius(ctx), MultistartConfig{});
        ok = ok && r.degree == 1 && r.certified;
        detail << "deg(" << lambda << ")=" << r.degree << (r.certified ? "" : "?") << " ";
    }
    return {ok, detail.str()};
}

Outcome index_bookkeeping_criterion() {
    const OperatorContext at6(kernel(), 6.0, 8);
    const OperatorContext at4(kernel(), 4.0, 8);
    const DegreeReport r6 = brouwer_degree(at6, apriori_radius(at6), MultistartConfig{});
    const DegreeReport r4 = brouwer_degree(at4, apriori_radius(at4), MultistartConfig{});
    const TrivialStability s = trivial_stability(kernel(), 6.0);
    bool ok = r6.zeros.size() == 3 && r4.zeros.size() == 1 && r4.zeros[0].jacobian_sign == 1;
    std::string signs;
    if (r6.zeros.size() == 3) {
        ok = ok && r6.zeros[0].jacobian_sign == -1 && r6.zeros[1].jacobian_sign == 1 &&
             r6.zeros[2].jacobian_sign == 1;
    }
    for (const Zero& z : r6.zeros) {
        signs += z.jacobian_sign > 0 ? "+1 " : "-1 ";
    }
    const double expected = 1.0 - 4.0 / kPi;
    ok = ok && std::abs(s.smallest - expected) <= 1e-6;
    return {ok, "lambda=6 signs ( " + signs + ")" + fmt(", lambda=4 zeros %.0f, smallest eig %.8f", r4.zeros.size(),
                                                        s.smallest)};
}

Outcome diagonal_criterion() {
    const OperatorContext ctx(kernel(), 1.0, 12, 512);
    const Eigen::MatrixXd a = jacobian(ctx.zero(), ctx);
    double worst = 0.0;
    for (int n = 0; n < 12; ++n) {
        for (int m = 0; m < 12; ++m) {
            const double expected = n == m ? -testing::onsager_k_closed(n + 1) / 2.0 : 0.0;
            worst = std::max(worst, std::abs(a(n, m) - expected));
        }
    }
    return {worst < 1e-10, fmt("max deviation %.2e", worst)};
}

Outcome gruss_criterion() {
    const double lambda = 6.0;
    const OperatorContext ctx(kernel(), lambda, 8);
    const double radius = lambda * kernel().sup_norm();
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> size(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto c = testing::random_coeffs(rng, 8, radius * size(rng));
        worst = std::max(worst, gruss_check(SpectralFn(c, ctx.grid_size()), ctx).max_ratio);
    }
    return {worst <= 1.0 + 1e-8, fmt("max |a_nm|/|k_m| = %.6f over 100 samples", worst)};
}

Outcome finite_difference_criterion() {
    const OperatorContext ctx(kernel(), 1.0, 8);
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> mode(1, 8);
    std::uniform_real_distribution<double> size(0.1, 3.0);
    const double h = 1e-5;
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const SpectralFn u(testing::random_coeffs(rng, 8, size(rng)), ctx.grid_size());
        const int n = mode(rng);
        Eigen::VectorXd plus = u.coeffs(), minus = u.coeffs();
        plus[n - 1] += h;
        minus[n - 1] -= h;
        const Eigen::VectorXd fd =
            (gamma(ctx.function(plus), ctx).coeffs() - gamma(ctx.function(minus), ctx).coeffs()) / (2 * h);
        const Eigen::VectorXd analytic = jacobian(u, ctx).row(n - 1).transpose();
        worst = std::max(worst, (fd - analytic).norm() / analytic.norm());
    }
    return {worst < 1e-6, fmt("max relative error %.2e", worst)};
}

Outcome stabilization_criterion() {
    const StabilizationTable t = degree_stabilization(kernel(), 6.0, 0.5, MultistartConfig{}, 2, 16);
    bool ok = t.constant;
    std::ostringstream detail;
    detail << "N=2..16 degrees";
    for (const StabilizationRow& row : t.rows) {
        ok = ok && row.certified && row.degree == t.rows.front().degree;
        detail << " " << row.degree;
    }
    bool xy = true;
    for (int n = 2; n <= 12; ++n) {
        const OperatorContext ctx(kernel(), 6.0, n);
        const double r = apriori_radius(ctx);
        xy = xy && brouwer_degree(ctx, r, MultistartConfig{}, Pairing::X).degree ==
                       brouwer_degree(ctx, r, MultistartConfig{}, Pairing::Y).degree;
    }
    detail << "; X/Y equal N=2..12: " << (xy ? "yes" : "no");
    return {ok && xy, detail.str()};
}

Outcome bounds_criterion() {
    double worst_sup = -1e300;
    double worst_deriv = -1e300;
    int checked = 0;
    auto check = [&](const SpectralFn& u, double lambda) {
        worst_sup = std::max(worst_sup, sup_norm(u) - lambda * 2.0 / kPi);
        worst_deriv = std::max(worst_deriv, derivative_l2_norm(u) - 2.0 * kPi * lambda);
        ++checked;
    };
    for (double lambda : {0.5, 1.0, 3.0, 6.0, 10.0, 20.0}) {
        const OperatorContext ctx(kernel(), lambda, 8);
        for (const Zero& z : find_zeros(ctx, apriori_radius(ctx), MultistartConfig{}).zeros) {
            check(z.u, lambda);
        }
    }
    const BifurcationDiagram d = assemble_diagram(OperatorContext(kernel(), 1.0, 8), 25.0);
    for (const Branch& b : d.branches) {
        for (const BranchSample& s : b.samples) {
            check(s.u, s.lambda);
        }
    }
    const bool ok = worst_sup <= 1e-6 && worst_deriv <= 1e-6;
    return {ok, fmt("%.0f solutions, max excess sup %.3e, deriv %.3e", checked, worst_sup, worst_deriv)};
}

Outcome pitchfork_criterion() {
    const OperatorContext ctx(kernel(), 1.0, 8);
    const Branch plus = continue_branch(ctx, 1, +1, 10.0);
    const double lambda1 = -2.0 / kernel().k(1);
    const PitchforkFit fit = pitchfork_fit(plus, lambda1, 10);
    double worst = 0.0;
    for (const BranchSample& s : plus.samples) {
        const SpectralFn rotated = quarter_rotation(s.u, 1);
        worst = std::max(worst, residual(rotated, ctx.with_lambda(s.lambda)).coeffs().norm());
    }
    const ContinuationConfig cfg;
    const bool ok = fit.r_squared > 0.99 && worst < cfg.tol;
    return {ok, fmt("R^2 = %.6f, exponent %.4f, rotated residual %.1e", fit.r_squared, fit.exponent, worst)};
}

Outcome determinism_criterion() {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "onsager_acceptance";
    fs::remove_all(base);
    std::string texts[2];
    for (int i = 0; i < 2; ++i) {
        const fs::path dir = base / std::to_string(i);
        fs::create_directories(dir);
        const std::string cmd =
            std::string(ONSAGER_CLI_PATH) + " verify --seed 7 --out " + dir.string() + " > /dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
            return {false, "verify run " + std::to_string(i) + " exited with status " +
                               std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1)};
        }
        std::ifstream in(dir / "verify.json", std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        texts[i] = ss.str();
    }
    fs::remove_all(base);
    const bool ok = !texts[0].empty() && texts[0] == texts[1];
    return {ok, fmt("two verify artifacts of %.0f bytes, identical: ", texts[0].size()) + (ok ? "yes" : "no")};
}

}  // namespace

int main() {
    report(1, "bifurcation points", bifurcation_points_criterion);
    report(2, "uniqueness below lambda_0", uniqueness_criterion);
    report(3, "degree constancy", degree_constancy_criterion);
    report(4, "index bookkeeping across the pitchfork", index_bookkeeping_criterion);
    report(5, "linearization diagonal at u = 0", diagonal_criterion);
    report(6, "Gruss bound", gruss_criterion);
    report(7, "Jacobian vs finite differences", finite_difference_criterion);
    report(8, "degree stabilization and pairing equality", stabilization_criterion);
    report(9, "bounds on solutions", bounds_criterion);
    report(10, "pitchfork scaling and symmetry", pitchfork_criterion);
    report(11, "determinism of verify artifacts", determinism_criterion);
    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
