#include "onsager/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace onsager {

using nlohmann::json;

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

const char* domain_name(Domain::Kind k) { return k == Domain::Kind::SupBall ? "sup_ball" : "coeff_ball"; }

std::string branch_id(const Branch& b) {
    return "mode" + std::to_string(b.parent_mode) + (b.sign > 0 ? "+" : "-");
}

}  // namespace

json to_json(const SpectralFn& u) {
    return {{"n_modes", u.n_modes()},
            {"coeffs", std::vector<double>(u.coeffs().begin(), u.coeffs().end())},
            {"grid_size", u.grid_size()}};
}

SpectralFn spectral_fn_from_json(const json& j) {
    auto coeffs = j.at("coeffs").get<std::vector<double>>();
    if (j.contains("n_modes") && j.at("n_modes").get<int>() != static_cast<int>(coeffs.size())) {
        throw std::invalid_argument("SpectralFn JSON: n_modes does not match coeffs length");
    }
    return SpectralFn(std::move(coeffs), j.at("grid_size").get<int>());
}

json to_json(const Zero& z) {
    return {{"u", to_json(z.u)},
            {"index", z.jacobian_sign},
            {"residual_norm", z.residual_norm},
            {"sup_norm", z.sup_norm},
            {"hits", z.hits}};
}

json to_json(const DegreeReport& r) {
    json zeros = json::array();
    json hist = json::array();
    for (const auto& z : r.zeros) {
        zeros.push_back(to_json(z));
        hist.push_back(z.hits);
    }
    json j = {{"level", r.level},
              {"grid_size", r.grid_size},
              {"lambda", r.lambda},
              {"pairing", to_string(r.pairing)},
              {"domain", {{"kind", domain_name(r.domain_kind)}, {"radius", r.domain_radius}}},
              {"zeros", zeros},
              {"degree", r.degree},
              {"boundary_margin", finite_or_null(r.boundary_margin)},
              {"min_separation", finite_or_null(r.min_separation)},
              {"certified", r.certified},
              {"reasons", r.reasons},
              {"n_starts", r.n_starts},
              {"seed", r.seed},
              {"newton_tol", r.newton_tol},
              {"starts_per_zero", hist},
              {"failed_starts", r.failed_starts},
              {"exterior_hits", r.exterior_hits}};
    if (r.matches_global_degree) {
        j["matches_global_degree"] = *r.matches_global_degree;
    }
    return j;
}

json to_json(const StabilizationTable& t) {
    json rows = json::array();
    for (const auto& r : t.rows) {
        rows.push_back({{"level", r.level},
                        {"grid_size", r.grid_size},
                        {"degree", r.degree},
                        {"zeros", r.n_zeros},
                        {"certified", r.certified}});
    }
    return {{"lambda", t.lambda},
            {"radius_margin", t.radius_margin},
            {"rows", rows},
            {"stable_from", t.stable_from},
            {"constant", t.constant}};
}

json to_json(const DecompositionReport& r) {
    return {{"total_degree", r.total_degree},
            {"sub_degrees", r.sub_degrees},
            {"sub_radii", r.sub_radii},
            {"remainder_degree", r.remainder_degree},
            {"remainder_zeros", r.remainder_zeros},
            {"consistent", r.consistent}};
}

json to_json(const HomotopyReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        rows.push_back(
            {{"t", row.t}, {"lambda", row.lambda}, {"degree", row.degree}, {"certified", row.certified}});
    }
    return {{"radius", r.radius}, {"rows", rows}, {"constant", r.constant}};
}

json to_json(const TrivialStability& s) {
    return {{"stable", s.stable},
            {"smallest_eigenvalue", s.smallest},
            {"negative_count", s.negative_count},
            {"spectrum", s.spectrum}};
}

json to_json(const Branch& b) {
    json samples = json::array();
    for (const auto& s : b.samples) {
        samples.push_back({{"lambda", s.lambda},
                           {"amplitude", s.amplitude},
                           {"leading", s.leading},
                           {"residual_norm", s.residual_norm},
                           {"stable", s.stable},
                           {"u", to_json(s.u)}});
    }
    return {{"id", branch_id(b)},
            {"parent_mode", b.parent_mode},
            {"sign", b.sign},
            {"complete", b.complete},
            {"failure", b.failure},
            {"fold_detected", b.fold_detected},
            {"fold_lambdas", b.fold_lambdas},
            {"stability_label", "linearization (heuristic off the trivial branch)"},
            {"samples", samples}};
}

json to_json(const BifurcationDiagram& d) {
    json trivial = json::array();
    for (const auto& s : d.trivial_branch) {
        trivial.push_back({{"lambda", s.lambda}, {"stable", s.stable}});
    }
    json branches = json::array();
    for (const auto& b : d.branches) {
        branches.push_back(to_json(b));
    }
    return {{"n_trunc", d.n_trunc},
            {"grid_size", d.grid_size},
            {"lambda_max", d.lambda_max},
            {"lambda_points", d.lambda_points},
            {"trivial_branch", trivial},
            {"branches", branches},
            {"complete", d.complete},
            {"notes", d.notes}};
}

std::string diagram_to_csv(const BifurcationDiagram& d) {
    std::ostringstream os;
    os << "branch,mode,sign,lambda,amplitude,leading,stable\n";
    for (const auto& s : d.trivial_branch) {
        os << "trivial,0,0," << num(s.lambda) << ",0,0," << (s.stable ? 1 : 0) << "\n";
    }
    for (const auto& b : d.branches) {
        for (const auto& s : b.samples) {
            os << branch_id(b) << "," << b.parent_mode << "," << b.sign << "," << num(s.lambda) << ","
               << num(s.amplitude) << "," << num(s.leading) << "," << (s.stable ? 1 : 0) << "\n";
        }
    }
    return os.str();
}

}  // namespace onsager
