#include "onsager/commands.hpp"

#include "onsager/bifurcation.hpp"
#include "onsager/errors.hpp"
#include "onsager/serialization.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#ifndef ONSAGER_VERSION
#define ONSAGER_VERSION "0.0.0"
#endif

namespace onsager {

using nlohmann::json;

namespace {

constexpr double kDefaultSolveLambda = 1.0;
constexpr double kDefaultVerifyLambda = 6.0;

json envelope(const std::string& command, const RunConfig& c) {
    return {{"tool", "onsager-degree"},
            {"version", library_version()},
            {"command", command},
            {"config", config_to_json(c)}};
}

// Random element of Y_N with ||u||_inf = fraction * radius, decaying spectrum.
SpectralFn random_function(std::mt19937_64& rng, int n, int m, double radius) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::VectorXd c(n);
    for (int i = 0; i < n; ++i) {
        c[i] = normal(rng) / (1.0 + i);
    }
    SpectralFn u(c, m);
    const double s = sup_norm(u);
    return u.with_coeffs(c * (unit(rng) * radius / s));
}

json check(const std::string& name, bool passed, json detail) {
    return {{"name", name}, {"passed", passed}, {"detail", std::move(detail)}};
}

json bounds_json(const BoundCheck& b) {
    return {{"sup_norm", b.sup_norm},
            {"apriori_bound", b.apriori_bound},
            {"derivative_l2", b.derivative_norm},
            {"regularity_bound", b.regularity_bound},
            {"apriori_ok", b.apriori_ok},
            {"regularity_ok", b.regularity_ok}};
}

bool is_onsager(const KernelSpec& k) { return k.label().rfind("onsager", 0) == 0; }

}  // namespace

const char* library_version() { return ONSAGER_VERSION; }

MultistartConfig RunConfig::multistart() const {
    MultistartConfig m;
    m.n_starts = starts;
    m.seed = seed;
    return m;
}

std::pair<int, int> parse_level_range(const std::string& text) {
    const auto dots = text.find("..");
    auto parse = [&](const std::string& s) {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used != s.size()) {
            throw std::invalid_argument("bad level: " + text);
        }
        return v;
    };
    if (dots == std::string::npos) {
        const int v = parse(text);
        return {v, v};
    }
    const int lo = parse(text.substr(0, dots));
    const int hi = parse(text.substr(dots + 2));
    if (lo > hi) {
        throw std::invalid_argument("empty level range: " + text);
    }
    return {lo, hi};
}

RunConfig config_from_json(const json& j, RunConfig c) {
    for (const auto& [key, value] : j.items()) {
        if (key == "kernel") {
            c.kernel = value.get<std::string>();
        } else if (key == "lambda") {
            if (value.is_null()) {
                c.lambda.reset();
            } else {
                c.lambda = value.get<double>();
            }
        } else if (key == "lambda_max") {
            c.lambda_max = value.get<double>();
        } else if (key == "n") {
            const auto [lo, hi] = value.is_string() ? parse_level_range(value.get<std::string>())
                                                    : std::pair{value.get<int>(), value.get<int>()};
            c.n_lo = lo;
            c.n_hi = hi;
        } else if (key == "grid") {
            c.grid = value.get<int>();
        } else if (key == "radius_margin") {
            c.radius_margin = value.get<double>();
        } else if (key == "radius") {
            if (value.is_null()) {
                c.radius.reset();
            } else {
                c.radius = value.get<double>();
            }
        } else if (key == "starts") {
            c.starts = value.get<int>();
        } else if (key == "seed") {
            c.seed = value.get<std::uint64_t>();
        } else if (key == "out") {
            c.out = value.get<std::string>();
        } else if (key == "format") {
            c.formats = value.is_string() ? std::vector<std::string>{value.get<std::string>()}
                                          : value.get<std::vector<std::string>>();
        } else {
            throw std::invalid_argument("unknown config key: " + key);
        }
    }
    return c;
}

json config_to_json(const RunConfig& c) {
    json j = {{"kernel", c.kernel},
              {"lambda", c.lambda ? json(*c.lambda) : json(nullptr)},
              {"lambda_max", c.lambda_max},
              {"n", c.level_range() ? json(std::to_string(c.n_lo) + ".." + std::to_string(c.n_hi))
                                    : json(c.n_lo)},
              {"grid", c.grid},
              {"radius_margin", c.radius_margin},
              {"radius", c.radius ? json(*c.radius) : json(nullptr)},
              {"starts", c.starts},
              {"seed", c.seed},
              {"format", c.formats}};
    return j;
}

void validate(const RunConfig& c) {
    if (c.n_lo < 1 || c.n_hi < c.n_lo) {
        throw std::invalid_argument("--n must be a positive level or range lo..hi");
    }
    if (c.grid < 0 || c.starts < 0) {
        throw std::invalid_argument("--grid and --starts must be nonnegative");
    }
    if (c.lambda && (*c.lambda < 0.0 || !std::isfinite(*c.lambda))) {
        throw std::invalid_argument("--lambda must be finite and nonnegative");
    }
    if (!(c.lambda_max > 0.0)) {
        throw std::invalid_argument("--lambda-max must be positive");
    }
    if (!(c.radius_margin > 0.0)) {
        throw std::invalid_argument("--radius-margin must be positive");
    }
    if (c.radius && !(*c.radius > 0.0)) {
        throw std::invalid_argument("--radius must be positive");
    }
    for (const auto& f : c.formats) {
        if (f != "json" && f != "csv" && f != "svg") {
            throw std::invalid_argument("unknown format: " + f);
        }
    }
}

CommandResult cmd_solve(const RunConfig& c) {
    const KernelSpec kernel = kernel_from_selector(c.kernel);
    const OperatorContext ctx(kernel, c.lambda.value_or(kDefaultSolveLambda), c.n_lo, c.grid);
    const double radius = c.radius.value_or(apriori_radius(ctx, c.radius_margin));
    const DegreeReport report = brouwer_degree(ctx, radius, c.multistart());

    json zeros = json::array();
    for (const auto& z : report.zeros) {
        json jz = to_json(z);
        jz["bounds"] = bounds_json(check_bounds(z.u, ctx));
        zeros.push_back(std::move(jz));
    }
    CommandResult r;
    r.artifact = envelope("solve", c);
    r.artifact["status"] = "ok";
    r.artifact["result"] = {{"lambda", ctx.lambda()},
                            {"N", ctx.n_trunc()},
                            {"M", ctx.grid_size()},
                            {"R", radius},
                            {"uniqueness_threshold", kernel.uniqueness_threshold()},
                            {"zeros", zeros},
                            {"degree", report.degree},
                            {"certified", report.certified},
                            {"reasons", report.reasons}};
    return r;
}

CommandResult cmd_degree(const RunConfig& c) {
    const KernelSpec kernel = kernel_from_selector(c.kernel);
    const double lambda = c.lambda.value_or(kDefaultSolveLambda);
    CommandResult r;
    r.artifact = envelope("degree", c);
    if (c.level_range()) {
        const StabilizationTable table =
            degree_stabilization(kernel, lambda, c.radius_margin, c.multistart(), c.n_lo, c.n_hi);
        const bool all_certified = std::all_of(table.rows.begin(), table.rows.end(),
                                               [](const StabilizationRow& row) { return row.certified; });
        r.artifact["status"] = all_certified ? "ok" : "uncertified";
        r.artifact["result"] = {{"lambda", lambda}, {"stabilization", to_json(table)}};
        r.exit_code = all_certified ? kExitOk : kExitRefusal;
        return r;
    }
    const OperatorContext ctx(kernel, lambda, c.n_lo, c.grid);
    const double radius = c.radius.value_or(apriori_radius(ctx, c.radius_margin));
    const DegreeReport report = brouwer_degree(ctx, radius, c.multistart());
    r.artifact["status"] = report.certified ? "ok" : "uncertified";
    r.artifact["result"] = {{"N", ctx.n_trunc()},
                            {"M", ctx.grid_size()},
                            {"R", radius},
                            {"apriori_radius", ctx.lambda() * kernel.sup_norm()},
                            {"report", to_json(report)}};
    r.exit_code = report.certified ? kExitOk : kExitRefusal;
    return r;
}

CommandResult cmd_bifurcate(const RunConfig& c) {
    const KernelSpec kernel = kernel_from_selector(c.kernel);
    const OperatorContext ctx(kernel, 0.0, c.n_lo, c.grid);
    const BifurcationDiagram d = assemble_diagram(ctx, c.lambda_max);
    CommandResult r;
    r.artifact = envelope("bifurcate", c);
    r.artifact["status"] = d.complete ? "ok" : "incomplete";
    r.artifact["result"] = {{"N", ctx.n_trunc()}, {"M", ctx.grid_size()}, {"diagram", to_json(d)}};
    r.csv = diagram_to_csv(d);
    r.svg = diagram_to_svg(d);
    return r;
}

CommandResult cmd_verify(const RunConfig& c) {
    const KernelSpec kernel = kernel_from_selector(c.kernel);
    const double lambda = c.lambda.value_or(kDefaultVerifyLambda);
    const int n = c.n_lo;
    const OperatorContext ctx(kernel, lambda, n, c.grid);
    guard_bifurcation_band(ctx);
    const MultistartConfig ms = c.multistart();
    const double radius = c.radius.value_or(apriori_radius(ctx, c.radius_margin));
    std::mt19937_64 rng(c.seed);
    json checks = json::array();

    {
        json detail = {{"n_modes", kernel.n_modes()},
                       {"sup_norm", kernel.sup_norm()},
                       {"deriv_sup_norm", kernel.deriv_sup_norm()},
                       {"lambda0", kernel.uniqueness_threshold()},
                       {"warnings", kernel.warnings()}};
        checks.push_back(check("kernel_invariants", true, detail));
    }
    {
        const auto points = bifurcation_points(kernel, 30.0);
        const auto by_det = bifurcation_points_by_determinant(kernel, std::min(n, 2), 0.1, 30.0);
        bool ok = !points.empty() && by_det.size() >= 1;
        double max_det_diff = 0.0;
        for (std::size_t i = 0; i < by_det.size() && i < points.size(); ++i) {
            max_det_diff = std::max(max_det_diff, std::abs(by_det[i] - points[i]));
        }
        ok = ok && max_det_diff < 1e-6;
        double max_closed_diff = 0.0;
        if (is_onsager(kernel)) {
            for (std::size_t i = 0; i < points.size(); ++i) {
                const double m = static_cast<double>(i + 1);
                max_closed_diff = std::max(
                    max_closed_diff, std::abs(points[i] - std::numbers::pi * (4 * m * m - 1) / 2));
            }
            ok = ok && max_closed_diff < 1e-6;
        }
        checks.push_back(check("bifurcation_points", ok,
                               {{"lambda_points", points},
                                {"determinant_crossings", by_det},
                                {"max_determinant_diff", max_det_diff},
                                {"max_closed_form_diff", max_closed_diff}}));
    }
    {
        const Eigen::MatrixXd a0 = jacobian(ctx.zero(), ctx);
        double err = 0.0;
        for (int i = 1; i <= n; ++i) {
            for (int j = 1; j <= n; ++j) {
                const double expected = i == j ? -kernel.k(i) / 2.0 : 0.0;
                err = std::max(err, std::abs(a0(i - 1, j - 1) - expected));
            }
        }
        checks.push_back(check("linearization_diagonal", err < 1e-10, {{"max_error", err}}));
    }
    {
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const SpectralFn u = random_function(rng, n, ctx.grid_size(), lambda * kernel.sup_norm());
            worst = std::max(worst, gruss_check(u, ctx).max_ratio);
        }
        SpectralFn peaked = random_function(rng, n, ctx.grid_size(), 1.0);
        peaked = peaked.with_coeffs(peaked.coeffs() * (20.0 / sup_norm(peaked)));
        const double stress = gruss_check(peaked, ctx).max_ratio;
        checks.push_back(check("gruss_bound", worst <= 1.0 + 1e-8 && stress <= 1.0 + 1e-8,
                               {{"max_ratio", worst}, {"stress_ratio", stress}}));
    }
    {
        double worst = 0.0;
        const double h = 1e-5;
        for (int i = 0; i < 20; ++i) {
            const SpectralFn u = random_function(rng, n, ctx.grid_size(), lambda * kernel.sup_norm());
            std::normal_distribution<double> normal(0.0, 1.0);
            Eigen::VectorXd d(n);
            for (int k = 0; k < n; ++k) {
                d[k] = normal(rng);
            }
            d.normalize();
            const Eigen::VectorXd analytic = jacobian(u, ctx).transpose() * d;
            const Eigen::VectorXd fd =
                (gamma(u.with_coeffs(u.coeffs() + h * d), ctx).coeffs() -
                 gamma(u.with_coeffs(u.coeffs() - h * d), ctx).coeffs()) /
                (2.0 * h);
            worst = std::max(worst, (fd - analytic).norm() / analytic.norm());
        }
        checks.push_back(check("jacobian_finite_difference", worst < 1e-6, {{"max_rel_error", worst}}));
    }
    {
        double worst = 0.0;
        for (int i = 0; i < 10; ++i) {
            const SpectralFn u = random_function(rng, n, ctx.grid_size(), lambda * kernel.sup_norm());
            worst = std::max(worst,
                             (gamma(u, ctx).coeffs() - gamma_by_convolution(u, ctx).coeffs()).cwiseAbs().maxCoeff());
        }
        checks.push_back(check("gamma_routes_agree", worst < 1e-9, {{"max_abs_diff", worst}}));
    }
    {
        const DegreeReport report = brouwer_degree(ctx, radius, ms);
        bool bounds_ok = true;
        json per_zero = json::array();
        for (const auto& z : report.zeros) {
            const BoundCheck b = check_bounds(z.u, ctx);
            bounds_ok = bounds_ok && b.apriori_ok && b.regularity_ok;
            per_zero.push_back(bounds_json(b));
        }
        checks.push_back(check("degree", report.certified && report.degree == 1,
                               {{"report", to_json(report)}}));
        checks.push_back(check("solution_bounds", bounds_ok, {{"zeros", per_zero}}));
    }
    {
        bool ok = true;
        json rows = json::array();
        for (int level = 2; level <= std::max(12, n); ++level) {
            const OperatorContext lc(kernel, lambda, level, c.grid > 0 ? std::max(c.grid, 4 * level) : 0);
            const double lr = apriori_radius(lc, c.radius_margin);
            const DegreeReport rx = brouwer_degree(lc, lr, ms, Pairing::X);
            const DegreeReport ry = brouwer_degree(lc, lr, ms, Pairing::Y);
            bool same_zeros = rx.zeros.size() == ry.zeros.size();
            for (std::size_t i = 0; same_zeros && i < rx.zeros.size(); ++i) {
                same_zeros = (rx.zeros[i].u.coeffs() - ry.zeros[i].u.coeffs()).norm() < 1e-8;
            }
            ok = ok && rx.degree == ry.degree && same_zeros;
            rows.push_back({{"level", level},
                            {"degree_x", rx.degree},
                            {"degree_y", ry.degree},
                            {"zero_sets_coincide", same_zeros}});
        }
        checks.push_back(check("xy_degree_equality", ok, {{"rows", rows}}));
    }
    {
        const StabilizationTable table =
            degree_stabilization(kernel, lambda, c.radius_margin, ms, 2, std::max(16, n));
        checks.push_back(check("degree_stabilization", table.constant && table.rows.back().degree == 1,
                               to_json(table)));
    }
    {
        const HomotopyReport h = convex_homotopy_check(ctx, radius, ms, 11);
        checks.push_back(check("homotopy_constancy", h.constant && h.rows.front().degree == 1,
                               to_json(h)));
    }
    {
        const DecompositionReport d = domain_decomposition_check(ctx, radius, ms);
        checks.push_back(check("domain_decomposition", d.consistent, to_json(d)));
    }
    {
        const double lambda1 = -2.0 / kernel.k(1);
        const Branch b = continue_branch(ctx, 1, 1, lambda1 + 1.0);
        bool ok = b.samples.size() >= 10;
        json detail;
        if (ok) {
            const PitchforkFit fit = pitchfork_fit(b, lambda1, 10);
            bool leading_positive = true;
            bool bounds_ok = true;
            double symmetry_residual = 0.0;
            for (const auto& s : b.samples) {
                const OperatorContext sc = ctx.with_lambda(s.lambda);
                leading_positive = leading_positive && s.leading > 0.0;
                const BoundCheck bc = check_bounds(s.u, sc);
                bounds_ok = bounds_ok && bc.apriori_ok && bc.regularity_ok;
                symmetry_residual =
                    std::max(symmetry_residual, residual(quarter_rotation(s.u, 1), sc).coeffs().norm());
            }
            ok = fit.r_squared > 0.99 && leading_positive && bounds_ok && symmetry_residual < 1e-10 &&
                 std::abs(fit.exponent - 0.5) <= 0.05;
            detail = {{"r_squared", fit.r_squared},
                      {"slope", fit.slope},
                      {"exponent", fit.exponent},
                      {"leading_positive", leading_positive},
                      {"bounds_ok", bounds_ok},
                      {"symmetry_residual", symmetry_residual},
                      {"samples", b.samples.size()}};
        } else {
            detail = {{"failure", b.failure}, {"samples", b.samples.size()}};
        }
        checks.push_back(check("pitchfork", ok, detail));
    }
    {
        const TrivialStability s = trivial_stability(kernel, lambda);
        const double lambda1 = -2.0 / kernel.k(1);
        const bool expected_stable = lambda < lambda1;
        checks.push_back(check("trivial_stability", s.stable == expected_stable,
                               {{"lambda", lambda}, {"stability", to_json(s)}}));
    }

    bool all = true;
    for (const auto& ch : checks) {
        all = all && ch.at("passed").get<bool>();
    }
    CommandResult r;
    r.artifact = envelope("verify", c);
    r.artifact["status"] = all ? "pass" : "fail";
    r.artifact["result"] = {{"lambda", lambda},
                            {"N", n},
                            {"M", ctx.grid_size()},
                            {"R", radius},
                            {"checks", checks}};
    r.exit_code = all ? kExitOk : kExitRefusal;
    return r;
}

CommandResult run_command(const std::string& command, const RunConfig& c) {
    try {
        validate(c);
        if (command == "solve") {
            return cmd_solve(c);
        }
        if (command == "degree") {
            return cmd_degree(c);
        }
        if (command == "bifurcate") {
            return cmd_bifurcate(c);
        }
        if (command == "verify") {
            return cmd_verify(c);
        }
        throw std::invalid_argument("unknown command: " + command);
    } catch (const MathRefusal& e) {
        CommandResult r;
        r.exit_code = kExitRefusal;
        r.artifact = envelope(command, c);
        r.artifact["status"] = "refused";
        r.artifact["message"] = e.what();
        return r;
    } catch (const std::exception& e) {
        CommandResult r;
        r.exit_code = kExitIo;
        r.artifact = envelope(command, c);
        r.artifact["status"] = "error";
        r.artifact["message"] = e.what();
        return r;
    }
}

std::string dump_artifact(const json& artifact) { return artifact.dump(2) + "\n"; }

bool write_outputs(const std::string& command, const CommandResult& r, const RunConfig& c,
                   std::ostream& console) {
    auto wants = [&](const std::string& f) {
        return std::find(c.formats.begin(), c.formats.end(), f) != c.formats.end();
    };
    if (c.out.empty()) {
        console << dump_artifact(r.artifact);
        return true;
    }
    std::error_code ec;
    std::filesystem::create_directories(c.out, ec);
    if (ec) {
        return false;
    }
    const std::filesystem::path dir(c.out);
    auto write = [&](const std::string& name, const std::string& text) {
        std::ofstream f(dir / name, std::ios::binary);
        f << text;
        return static_cast<bool>(f);
    };
    bool ok = true;
    if (wants("json") || r.csv.empty()) {
        ok = write(command + ".json", dump_artifact(r.artifact)) && ok;
    }
    if (wants("csv") && !r.csv.empty()) {
        ok = write(command + ".csv", r.csv) && ok;
    }
    if (wants("svg") && !r.svg.empty()) {
        ok = write(command + ".svg", r.svg) && ok;
    }
    return ok;
}

}  // namespace onsager
