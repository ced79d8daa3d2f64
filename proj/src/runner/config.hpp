#pragma once

// Experiment configuration: a single JSON document whose keys may be
// overridden one by one. Unset optional keys are derived per run from lambda,
// so sweeps over lambda rescale their windows automatically.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/fit.hpp"
#include "core/manifold.hpp"

namespace igchaos::runner {

using nlohmann::json;

struct MaxEntSettings {
    double mean = 0.0;
    double stddev = 1.0;
    double lo = -10.0;
    double hi = 10.0;
    int nodes = 2001;
    double tolerance = 1e-10;
    int max_iterations = 100;
};

struct ExperimentConfig {
    int N = 1;
    double lambda_rate = 1.0;
    double Lambda = 2.8284271247461903;
    double C = 0.0;
    std::optional<double> tau_max;  // default 40 / lambda
    int tau_samples = 401;
    double rel_tol = 1e-10;
    std::optional<double> delta_lambda;     // default 1e-5 * lambda
    std::optional<Window> fit_window;       // default [tau_max / 2, tau_max]
    std::optional<Window> lyapunov_window;  // default [tau_max / 4, tau_max / 2]
    int quad_points = 64;
    int curvature_samples = 1000;  // random points for the Ricci constancy check
    std::vector<int> sweep_N;
    std::vector<double> sweep_lambda;
    int workers = 0;  // 0 = hardware concurrency
    std::string output_dir;
    bool emit_svg = false;
    std::uint64_t rng_seed = 12345;
    MaxEntSettings maxent;
};

/// Every value concrete and validated, for one (N, lambda) pair.
struct ResolvedConfig {
    int N;
    double lambda_rate;
    double Lambda;
    double C;
    double tau_max;
    int tau_samples;
    double rel_tol;
    double delta_lambda;
    Window fit_window;
    Window lyapunov_window;
    Window jlc_check_window;  // [0, min(10 / lambda, tau_max)]
    int quad_points;
    int curvature_samples;
    std::uint64_t rng_seed;
    bool emit_svg;

    GeodesicParams params() const;
    std::vector<double> tau_grid() const;
};

/// Throws DomainError on unknown keys, wrong types or invalid values.
ExperimentConfig config_from_json(const json& doc);
/// Apply the keys present in `patch` on top of `config`.
void merge_config(ExperimentConfig& config, const json& patch);
ExperimentConfig load_config(const std::filesystem::path& path);

json to_json(const ExperimentConfig& config);
json to_json(const ResolvedConfig& config);

void validate(const ExperimentConfig& config);
ResolvedConfig resolve(const ExperimentConfig& config);
ResolvedConfig resolve_for(const ExperimentConfig& config, int N, double lambda_rate);

}  // namespace igchaos::runner
