// onsager-degree: Galerkin degree and bifurcation tool for the stationary
// Doi-Onsager equation on the circle.
//
//   onsager-degree solve     --kernel onsager:32 --lambda 6 --n 8
//   onsager-degree degree    --lambda 6 --n 2..12
//   onsager-degree bifurcate --lambda-max 25 --out run --format json,csv,svg
//   onsager-degree verify    --seed 7

#include "onsager/commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

struct Flags {
    std::string config;
    std::string kernel;
    double lambda = 0.0;
    double lambda_max = 0.0;
    std::string n;
    int grid = 0;
    double radius_margin = 0.0;
    double radius = 0.0;
    int starts = 0;
    std::uint64_t seed = 0;
    std::string out;
    std::string format;
};

std::vector<std::string> split_formats(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Topological degree and bifurcation analysis for the Onsager model on the circle"};
    app.set_version_flag("--version", std::string(onsager::library_version()));
    app.require_subcommand(1, 1);

    Flags flags;
    std::map<std::string, CLI::Option*> opts;
    for (const char* name : {"solve", "degree", "bifurcate", "verify"}) {
        CLI::App* sub = app.add_subcommand(name);
        opts[std::string(name) + "config"] =
            sub->add_option("--config", flags.config, "JSON config file; flags override it");
        opts[std::string(name) + "kernel"] =
            sub->add_option("--kernel", flags.kernel, "onsager:<n_modes> or file:<path>");
        opts[std::string(name) + "lambda"] = sub->add_option("--lambda", flags.lambda);
        opts[std::string(name) + "lambda_max"] = sub->add_option("--lambda-max", flags.lambda_max);
        opts[std::string(name) + "n"] =
            sub->add_option("--n", flags.n, "Galerkin level N, or a range lo..hi (degree)");
        opts[std::string(name) + "grid"] = sub->add_option("--grid", flags.grid, "quadrature size M");
        opts[std::string(name) + "radius_margin"] = sub->add_option("--radius-margin", flags.radius_margin);
        opts[std::string(name) + "radius"] =
            sub->add_option("--radius", flags.radius, "sup-norm radius of the domain (overrides margin)");
        opts[std::string(name) + "starts"] = sub->add_option("--starts", flags.starts);
        opts[std::string(name) + "seed"] = sub->add_option("--seed", flags.seed);
        opts[std::string(name) + "out"] = sub->add_option("--out", flags.out, "output directory");
        opts[std::string(name) + "format"] =
            sub->add_option("--format", flags.format, "comma-separated: json,csv,svg");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();
    auto given = [&](const char* key) { return opts.at(command + key)->count() > 0; };

    onsager::RunConfig config;
    try {
        if (given("config")) {
            std::ifstream in(flags.config);
            if (!in) {
                std::cerr << "error: cannot open config file " << flags.config << "\n";
                return onsager::kExitIo;
            }
            nlohmann::json j;
            in >> j;
            config = onsager::config_from_json(j);
        }
        if (given("kernel")) config.kernel = flags.kernel;
        if (given("lambda")) config.lambda = flags.lambda;
        if (given("lambda_max")) config.lambda_max = flags.lambda_max;
        if (given("n")) std::tie(config.n_lo, config.n_hi) = onsager::parse_level_range(flags.n);
        if (given("grid")) config.grid = flags.grid;
        if (given("radius_margin")) config.radius_margin = flags.radius_margin;
        if (given("radius")) config.radius = flags.radius;
        if (given("starts")) config.starts = flags.starts;
        if (given("seed")) config.seed = flags.seed;
        if (given("out")) config.out = flags.out;
        if (given("format")) config.formats = split_formats(flags.format);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return onsager::kExitIo;
    }

    const onsager::CommandResult result = onsager::run_command(command, config);
    if (!onsager::write_outputs(command, result, config, std::cout)) {
        std::cerr << "error: cannot write outputs to " << config.out << "\n";
        return onsager::kExitIo;
    }
    if (result.exit_code != onsager::kExitOk && result.artifact.contains("message")) {
        std::cerr << command << ": " << result.artifact.at("message").get<std::string>() << "\n";
    }
    return result.exit_code;
}
