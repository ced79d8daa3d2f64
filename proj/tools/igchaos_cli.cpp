// Command-line front end over the C interface.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "igchaos/igchaos.h"

namespace {

int exit_code(igc_status s) {
    switch (s) {
    case IGC_OK:
        return 0;
    case IGC_ERR_VALIDATION:
    case IGC_ERR_IO:
        return 1;
    case IGC_ERR_VERIFICATION:
        return 3;
    default:
        return 2;
    }
}

struct Result {
    igc_result* ptr = nullptr;
    ~Result() { igc_result_destroy(ptr); }
    std::string text() const { return igc_result_text(ptr); }
    std::string aux() const { return igc_result_aux(ptr); }
};

struct Config {
    igc_config* ptr = nullptr;
    ~Config() { igc_config_destroy(ptr); }
};

int report(igc_status s) {
    if (s != IGC_OK)
        std::cerr << "igchaos: " << igc_status_name(s) << ": " << igc_last_error() << "\n";
    return exit_code(s);
}

bool write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) {
        std::cerr << "igchaos: i/o error: cannot write " << path.string() << "\n";
        return false;
    }
    return true;
}

struct Options {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    bool svg = false;
    std::optional<int> N;
    std::optional<double> lambda, Lambda, tau_max, rel_tol, delta_lambda;
    std::optional<int> samples, workers;
    std::vector<int> sweep_N;
    std::vector<double> sweep_lambda;
    std::optional<double> mean, stddev, grid_lo, grid_hi;
    std::optional<int> nodes;
    std::string mutate;
};

std::string num(double v) {
    nlohmann::json j = v;
    return j.dump();
}

igc_status build_config(const Options& o, Config& cfg) {
    igc_status s = o.config_path.empty() ? igc_config_create(&cfg.ptr) : igc_config_load(o.config_path.c_str(), &cfg.ptr);
    if (s != IGC_OK)
        return s;
    std::vector<std::pair<std::string, std::string>> sets;
    if (o.N)
        sets.emplace_back("N", std::to_string(*o.N));
    if (o.lambda)
        sets.emplace_back("lambda", num(*o.lambda));
    if (o.Lambda)
        sets.emplace_back("Lambda", num(*o.Lambda));
    if (o.tau_max)
        sets.emplace_back("tau_max", num(*o.tau_max));
    if (o.samples)
        sets.emplace_back("tau_samples", std::to_string(*o.samples));
    if (o.rel_tol)
        sets.emplace_back("rel_tol", num(*o.rel_tol));
    if (o.delta_lambda)
        sets.emplace_back("delta_lambda", num(*o.delta_lambda));
    if (o.workers)
        sets.emplace_back("workers", std::to_string(*o.workers));
    if (o.seed)
        sets.emplace_back("rng_seed", std::to_string(*o.seed));
    if (o.svg)
        sets.emplace_back("emit_svg", "true");
    if (!o.sweep_N.empty())
        sets.emplace_back("sweep_N", nlohmann::json(o.sweep_N).dump());
    if (!o.sweep_lambda.empty())
        sets.emplace_back("sweep_lambda", nlohmann::json(o.sweep_lambda).dump());
    nlohmann::json maxent = nlohmann::json::object();
    if (o.mean)
        maxent["mean"] = *o.mean;
    if (o.stddev)
        maxent["stddev"] = *o.stddev;
    if (o.grid_lo)
        maxent["lo"] = *o.grid_lo;
    if (o.grid_hi)
        maxent["hi"] = *o.grid_hi;
    if (o.nodes)
        maxent["nodes"] = *o.nodes;
    if (!maxent.empty())
        sets.emplace_back("maxent", maxent.dump());
    for (const auto& [k, v] : sets)
        if ((s = igc_config_set(cfg.ptr, k.c_str(), v.c_str())) != IGC_OK)
            return s;
    return IGC_OK;
}

// --out wins over the config's output_dir
std::string output_dir(const Options& o, const Config& cfg) {
    if (!o.out_dir.empty())
        return o.out_dir;
    Result r;
    if (igc_config_to_json(cfg.ptr, &r.ptr) != IGC_OK)
        return {};
    return nlohmann::json::parse(r.text()).value("output_dir", std::string{});
}

using Producer = igc_status (*)(const igc_config*, igc_result**);

int table_command(const Options& o, Producer produce, const std::string& name, const char* aux_name) {
    Config cfg;
    if (auto s = build_config(o, cfg); s != IGC_OK)
        return report(s);
    Result r;
    if (auto s = produce(cfg.ptr, &r.ptr); s != IGC_OK)
        return report(s);
    const auto dir = output_dir(o, cfg);
    if (dir.empty()) {
        std::cout << r.text();
        if (aux_name && !r.aux().empty())
            std::cerr << r.aux();
        return 0;
    }
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        std::cerr << "igchaos: i/o error: cannot create " << dir << ": " << ec.message() << "\n";
        return 1;
    }
    if (!write_file(std::filesystem::path(dir) / (name + ".csv"), r.text()))
        return 1;
    if (aux_name && !r.aux().empty() && !write_file(std::filesystem::path(dir) / aux_name, r.aux()))
        return 1;
    return 0;
}

int run_command(const Options& o, bool sweep) {
    Config cfg;
    if (auto s = build_config(o, cfg); s != IGC_OK)
        return report(s);
    const auto dir = output_dir(o, cfg);
    if (dir.empty()) {
        std::cerr << "igchaos: validation error: " << (sweep ? "sweep" : "run")
                  << " needs an output directory (--out or output_dir in the config)\n";
        return 1;
    }
    Result r;
    const auto s = sweep ? igc_sweep(cfg.ptr, dir.c_str(), &r.ptr) : igc_run(cfg.ptr, dir.c_str(), &r.ptr);
    if (r.ptr)
        std::cout << r.text();
    return report(s);
}

int verify_command(const Options& o) {
    nlohmann::json opts = nlohmann::json::object();
    if (o.seed)
        opts["rng_seed"] = *o.seed;
    if (!o.mutate.empty()) {
        if (o.mutate != "christoffel-sign") {
            std::cerr << "igchaos: validation error: unknown mutation '" << o.mutate << "'\n";
            return 1;
        }
        opts["perturb_christoffel_sign"] = true;
    }
    Result r;
    const auto s = igc_verify(opts.dump().c_str(), &r.ptr);
    if (r.ptr) {
        std::cout << r.text();
        if (!o.out_dir.empty()) {
            std::error_code ec;
            std::filesystem::create_directories(o.out_dir, ec);
            if (ec || !write_file(std::filesystem::path(o.out_dir) / "verify.json", r.aux()))
                return 1;
        }
    }
    return report(s);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Information-geometric chaos simulator on the product-Gaussian statistical manifold"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(igc_version()));
    Options o;

    auto add_common = [&o](CLI::App* cmd) {
        cmd->add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
        cmd->add_option("--out", o.out_dir, "output directory");
        cmd->add_option("--seed", o.seed, "random seed");
        cmd->add_flag("--svg", o.svg, "also write SVG plots");
    };
    auto add_model = [&o](CLI::App* cmd) {
        cmd->add_option("--N", o.N, "number of microvariable triples (3N blocks)");
        cmd->add_option("--lambda", o.lambda, "instability rate lambda");
        cmd->add_option("--Lambda", o.Lambda, "geodesic constant Lambda");
        cmd->add_option("--tau-max", o.tau_max, "end of the tau range (default 40/lambda)");
        cmd->add_option("--samples", o.samples, "number of tau samples");
        cmd->add_option("--rel-tol", o.rel_tol, "integrator relative tolerance");
        cmd->add_option("--delta-lambda", o.delta_lambda, "family offset for the Jacobi field (default 1e-5 lambda)");
    };

    auto* curvature = app.add_subcommand("curvature", "closed-form geometry against the oracles at the starting point");
    auto* geodesic = app.add_subcommand("geodesic", "numeric geodesic CSV");
    auto* jacobi = app.add_subcommand("jacobi", "Jacobi field intensity CSV");
    auto* entropy = app.add_subcommand("entropy", "entropy series CSV with a fitted-slope summary");
    auto* maxent = app.add_subcommand("maxent", "maximum-entropy distribution on a grid");
    auto* run = app.add_subcommand("run", "full experiment with persisted record");
    auto* sweep = app.add_subcommand("sweep", "experiments over N x lambda");
    auto* verify = app.add_subcommand("verify", "run every oracle cross-check");

    for (auto* cmd : {curvature, geodesic, jacobi, entropy, run, sweep}) {
        add_common(cmd);
        add_model(cmd);
    }
    add_common(maxent);
    maxent->add_option("--mean", o.mean, "constraint mean");
    maxent->add_option("--stddev", o.stddev, "constraint standard deviation");
    maxent->add_option("--grid-lo", o.grid_lo, "grid lower bound");
    maxent->add_option("--grid-hi", o.grid_hi, "grid upper bound");
    maxent->add_option("--nodes", o.nodes, "grid node count");
    sweep->add_option("--sweep-N", o.sweep_N, "N values")->delimiter(',');
    sweep->add_option("--sweep-lambda", o.sweep_lambda, "lambda values")->delimiter(',');
    sweep->add_option("--workers", o.workers, "concurrent runs (0 = hardware)");
    verify->add_option("--out", o.out_dir, "directory for verify.json");
    verify->add_option("--seed", o.seed, "random seed");
    verify->add_option("--mutate", o.mutate, "test hook")->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (curvature->parsed())
        return table_command(o, igc_curvature_csv, "curvature", nullptr);
    if (geodesic->parsed())
        return table_command(o, igc_geodesic_csv, "geodesic", nullptr);
    if (jacobi->parsed())
        return table_command(o, igc_jacobi_csv, "jacobi", nullptr);
    if (entropy->parsed())
        return table_command(o, igc_entropy_csv, "entropy", "entropy_summary.json");
    if (maxent->parsed())
        return table_command(o, igc_maxent_csv, "maxent", "maxent_solution.json");
    if (run->parsed())
        return run_command(o, false);
    if (sweep->parsed())
        return run_command(o, true);
    return verify_command(o);
}
