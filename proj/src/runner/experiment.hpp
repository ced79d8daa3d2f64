#pragma once

// One experiment: curvature checks, geodesic integration, entropy series and
// Jacobi field with its oracle, fitted and persisted as CSV/JSON/SVG.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "core/dynamics.hpp"
#include "core/entropy.hpp"
#include "core/maxent.hpp"
#include "runner/config.hpp"
#include "runner/output.hpp"

namespace igchaos::runner {

inline constexpr int kSchemaVersion = 1;

enum class ErrorKind { None, Validation, Numerical, Io, Internal };
const char* error_kind_name(ErrorKind k);

// ---------------------------------------------------------------------------
// Tables behind the single-purpose subcommands

/// Closed form against oracle at the geodesic's starting point: metric,
/// connection, Ricci scalar and sectional curvatures.
CsvTable curvature_table(const ResolvedConfig& config);

dynamics::GeodesicTrajectory numeric_geodesic(const ResolvedConfig& config);
CsvTable geodesic_table(const dynamics::GeodesicTrajectory& trajectory);

/// JLC field seeded from the family oracle and integrated along the numeric geodesic.
dynamics::JacobiTrajectory numeric_jacobi(const ResolvedConfig& config,
                                          const dynamics::GeodesicTrajectory& geodesic);
CsvTable jacobi_table(const dynamics::JacobiTrajectory& trajectory);

entropy::VolumeSeries entropy_series(const ResolvedConfig& config);
CsvTable entropy_table(const entropy::VolumeSeries& series);
json entropy_summary(const ResolvedConfig& config, const entropy::VolumeSeries& series);

maxent::MaxEntSolution solve_maxent(const MaxEntSettings& settings);
CsvTable maxent_table(const maxent::MaxEntSolution& solution, const MaxEntSettings& settings);

// ---------------------------------------------------------------------------
// Runs

struct RunRecord {
    int schema_version = kSchemaVersion;
    json config;     // resolved values actually used
    json effective;  // merged configuration as supplied
    bool ok = false;
    ErrorKind error_kind = ErrorKind::None;
    std::vector<std::string> error_chain;

    int N = 0;
    double lambda_rate = 0.0;
    double ricci_scalar = 0.0;
    double entropy_slope = 0.0;
    double slope_ratio = 0.0;  // slope / (3 N lambda)
    double lyapunov = 0.0;
    double lyapunov_ratio = 0.0;  // lyapunov / lambda
    json details;                 // per-stage diagnostics
    std::map<std::string, std::string> artifacts;  // name -> path relative to the run directory

    double wall_seconds = 0.0;  // kept out of record.json so records stay reproducible

    json to_json() const;
};

/// Run one experiment. With a non-empty out_dir the artifacts are written
/// there; errors are captured in the record rather than thrown.
RunRecord run_experiment(const ExperimentConfig& effective, const ResolvedConfig& config,
                         const std::filesystem::path& out_dir);
RunRecord run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

struct SweepResult {
    std::vector<RunRecord> records;  // in (N, lambda) row-major order
    CsvTable summary;
    bool all_ok() const;
};

/// Cartesian product of sweep_N x sweep_lambda, each run in out_dir/N{N}_lambda{lambda}.
SweepResult run_sweep(const ExperimentConfig& config, const std::filesystem::path& out_dir);

std::string run_directory_name(int N, double lambda_rate);

}  // namespace igchaos::runner
