#include "runner/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <random>
#include <thread>

#include "core/errors.hpp"
#include "core/oracle.hpp"

namespace igchaos::runner {

const char* error_kind_name(ErrorKind k) {
    switch (k) {
    case ErrorKind::None:
        return "none";
    case ErrorKind::Validation:
        return "validation";
    case ErrorKind::Numerical:
        return "numerical";
    case ErrorKind::Io:
        return "io";
    case ErrorKind::Internal:
        return "internal";
    }
    return "internal";
}

namespace {

std::string fd(double v) { return format_double(v); }

void add_sectional_rows(CsvTable& t, const ThetaPoint& point) {
    const std::size_t dim = point.dimension();
    const std::size_t blocks = point.block_count();
    auto add = [&](Plane global, double oracle_value) {
        const double closed = sectional_curvature_at(point, global);
        t.add({"sectional", std::to_string(global.first), std::to_string(global.second), fd(closed),
               fd(oracle_value), fd(std::abs(closed - oracle_value))});
    };
    if (blocks <= 6) {
        std::vector<Plane> planes;
        for (std::size_t a = 0; a < dim; ++a)
            for (std::size_t b = a + 1; b < dim; ++b)
                planes.push_back({a, b});
        const auto k = oracle::fd_sectional_dense(point, planes, 1e-4 * point.min_sigma());
        for (std::size_t i = 0; i < planes.size(); ++i)
            add(planes[i], k[i]);
        return;
    }
    // Larger points: the curvature of a coordinate plane only involves the
    // blocks it spans, so each block pair (0, j) is checked on a three-block
    // sub-point {0, j, x} small enough for the dense oracle.
    for (std::size_t j = 1; j < blocks; ++j) {
        const std::size_t x = j + 1 < blocks ? j + 1 : 1;
        const ThetaPoint sub({point[0], point[j], point[x]});
        std::vector<Plane> local{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
        const auto k = oracle::fd_sectional_dense(sub, local, 1e-4 * sub.min_sigma());
        auto global = [j](std::size_t flat) { return flat < 2 ? flat : 2 * j + (flat - 2); };
        for (std::size_t i = 0; i < local.size(); ++i) {
            const Plane g{global(local[i].first), global(local[i].second)};
            // planes inside block 0 are reported once
            if (j > 1 && g.first < 2 && g.second < 2)
                continue;
            add(g, k[i]);
        }
    }
}

ThetaPoint random_point(int N, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> mu(-10.0, 10.0);
    std::uniform_real_distribution<double> log_sigma(std::log(0.1), std::log(10.0));
    std::vector<Block> b(static_cast<std::size_t>(3 * N));
    for (auto& blk : b)
        blk = {mu(rng), std::exp(log_sigma(rng))};
    return ThetaPoint(std::move(b));
}

double speed_sq(const Block& b, const TangentBlock& v) {
    const auto g = block_metric(b.sigma);
    return g.g_mumu * v.dmu * v.dmu + g.g_sigmasigma * v.dsigma * v.dsigma;
}

}  // namespace

CsvTable curvature_table(const ResolvedConfig& config) {
    const auto point = analytic_geodesic_eval(config.params(), 0.0).point;
    CsvTable t{{"quantity", "index_a", "index_b", "closed_form", "oracle", "abs_error"}, {}};

    const auto g = metric_at(point);
    const auto quad = oracle::fisher_metric_quadrature(point, {});
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto a = std::to_string(2 * k), b = std::to_string(2 * k + 1);
        t.add({"metric", a, a, fd(g[k].g_mumu), fd(quad.blocks[k].g_mumu),
               fd(std::abs(g[k].g_mumu - quad.blocks[k].g_mumu))});
        t.add({"metric", b, b, fd(g[k].g_sigmasigma), fd(quad.blocks[k].g_sigmasigma),
               fd(std::abs(g[k].g_sigmasigma - quad.blocks[k].g_sigmasigma))});
    }

    const auto gamma = christoffel_at(point);
    const auto gamma_fd = oracle::fd_christoffel(point, oracle::default_fd_step(point));
    for (std::size_t k = 0; k < gamma.size(); ++k) {
        const auto m = std::to_string(2 * k), s = std::to_string(2 * k + 1);
        auto row = [&](const char* name, const std::string& a, const std::string& b, double c, double o) {
            t.add({name, a, b, fd(c), fd(o), fd(std::abs(c - o))});
        };
        row("gamma_mu_musigma", m, s, gamma[k].mu_musigma, gamma_fd[k].mu_musigma);
        row("gamma_sigma_mumu", m, m, gamma[k].sigma_mumu, gamma_fd[k].sigma_mumu);
        row("gamma_sigma_sigmasigma", s, s, gamma[k].sigma_sigmasigma, gamma_fd[k].sigma_sigmasigma);
    }

    const double r = ricci_scalar_at(point);
    const double r_fd = oracle::fd_ricci_scalar(point, 1e-4 * point.min_sigma());
    t.add({"ricci_scalar", "", "", fd(r), fd(r_fd), fd(std::abs(r - r_fd))});

    add_sectional_rows(t, point);
    return t;
}

dynamics::GeodesicTrajectory numeric_geodesic(const ResolvedConfig& config) {
    const auto grid = config.tau_grid();
    auto traj = dynamics::integrate_geodesic(analytic_geodesic_eval(config.params(), 0.0), grid, config.rel_tol);
    if (!traj.complete())
        throw NumericalError(std::string("geodesic integration stopped (") + dynamics::status_name(traj.status) +
                             "): " + traj.message);
    return traj;
}

CsvTable geodesic_table(const dynamics::GeodesicTrajectory& traj) {
    CsvTable t{{"tau", "block", "mu", "sigma", "dmu", "dsigma", "speed_sq"}, {}};
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const auto& s = traj.states[i];
        for (std::size_t k = 0; k < s.point.block_count(); ++k) {
            const auto& b = s.point[k];
            const auto& v = s.velocity[k];
            t.add({fd(traj.tau_grid[i]), std::to_string(k), fd(b.mu), fd(b.sigma), fd(v.dmu), fd(v.dsigma),
                   fd(speed_sq(b, v))});
        }
    }
    return t;
}

dynamics::JacobiTrajectory numeric_jacobi(const ResolvedConfig& config,
                                          const dynamics::GeodesicTrajectory& geodesic) {
    const auto init = dynamics::jacobi_fd_initial(config.params(), config.delta_lambda, geodesic.tau_grid.front());
    auto traj = dynamics::integrate_jlc(geodesic, init, config.rel_tol);
    if (!traj.complete() && traj.status != dynamics::TrajectoryStatus::Overflow)
        throw NumericalError(std::string("JLC integration stopped (") + dynamics::status_name(traj.status) +
                             "): " + traj.message);
    return traj;
}

CsvTable jacobi_table(const dynamics::JacobiTrajectory& traj) {
    CsvTable t{{"tau", "intensity", "running_rate"}, {}};
    const auto rate = dynamics::running_rate(traj.tau_grid, traj.intensities);
    for (std::size_t i = 0; i < traj.tau_grid.size(); ++i)
        t.add({fd(traj.tau_grid[i]), fd(traj.intensities[i]), fd(rate[i])});
    return t;
}

entropy::VolumeSeries entropy_series(const ResolvedConfig& config) {
    auto grid = config.tau_grid();
    grid.erase(grid.begin());  // the volume is empty at tau = 0
    return entropy::ig_entropy_series(config.params(), grid, config.quad_points);
}

CsvTable entropy_table(const entropy::VolumeSeries& s) {
    CsvTable t{{"tau", "log_region_volume", "log_avg_volume", "entropy"}, {}};
    for (std::size_t i = 0; i < s.tau_grid.size(); ++i)
        t.add({fd(s.tau_grid[i]), fd(s.log_region_volume[i]), fd(s.log_avg_volume[i]), fd(s.entropy[i])});
    return t;
}

json entropy_summary(const ResolvedConfig& config, const entropy::VolumeSeries& s) {
    const auto fit = slope_fit(s.tau_grid, s.entropy, config.fit_window);
    const double expected = 3.0 * config.N * config.lambda_rate;
    bool overflow_free = true;
    bool increasing = true;
    for (std::size_t i = 0; i < s.entropy.size(); ++i) {
        overflow_free = overflow_free && std::isfinite(s.entropy[i]) && std::isfinite(s.log_region_volume[i]);
        if (i > 0 && s.tau_grid[i] >= config.fit_window.lo && s.tau_grid[i] <= config.fit_window.hi)
            increasing = increasing && s.entropy[i] > s.entropy[i - 1];
    }
    return json{{"N", config.N},
                {"lambda", config.lambda_rate},
                {"fit_window", {config.fit_window.lo, config.fit_window.hi}},
                {"slope", fit.slope},
                {"intercept", fit.intercept},
                {"r_squared", fit.r_squared},
                {"points", fit.points},
                {"expected_slope", expected},
                {"slope_ratio", fit.slope / expected},
                {"increasing_on_window", increasing},
                {"finite", overflow_free}};
}

maxent::MaxEntSolution solve_maxent(const MaxEntSettings& m) {
    return maxent::maxent_solve({m.lo, m.hi, m.nodes}, {m.mean, m.stddev}, {m.tolerance, m.max_iterations});
}

CsvTable maxent_table(const maxent::MaxEntSolution& sol, const MaxEntSettings& m) {
    CsvTable t{{"x", "weight", "gaussian_reference"}, {}};
    const auto ref = maxent::gaussian_reference(sol.distribution.grid, {m.mean, m.stddev});
    for (std::size_t i = 0; i < ref.size(); ++i)
        t.add({fd(sol.distribution.grid[i]), fd(sol.distribution.weights[i]), fd(ref[i])});
    return t;
}

// ---------------------------------------------------------------------------

json RunRecord::to_json() const {
    json artifacts_json = json::object();
    for (const auto& [k, v] : artifacts)
        artifacts_json[k] = v;
    return json{{"schema_version", schema_version},
                {"ok", ok},
                {"error_kind", error_kind_name(error_kind)},
                {"error_chain", error_chain},
                {"config", config},
                {"effective_config", effective},
                {"N", N},
                {"lambda", lambda_rate},
                {"ricci_scalar", ricci_scalar},
                {"entropy_slope", entropy_slope},
                {"slope_ratio", slope_ratio},
                {"lyapunov", lyapunov},
                {"lyapunov_ratio", lyapunov_ratio},
                {"details", details},
                {"artifacts", artifacts_json}};
}

namespace {

struct Stage {
    RunRecord& record;

    template <class F>
    bool operator()(const char* name, F&& body) {
        try {
            body();
            return true;
        } catch (const DomainError& e) {
            fail(ErrorKind::Validation, name, e.what());
        } catch (const NumericalError& e) {
            fail(ErrorKind::Numerical, name, e.what());
        } catch (const IoError& e) {
            fail(ErrorKind::Io, name, e.what());
        } catch (const std::exception& e) {
            fail(ErrorKind::Internal, name, e.what());
        }
        return false;
    }

    void fail(ErrorKind kind, const char* name, const std::string& what) {
        if (record.error_kind == ErrorKind::None)
            record.error_kind = kind;
        record.error_chain.push_back(std::string(name) + ": " + what);
    }
};

void run_stages(RunRecord& rec, const ResolvedConfig& cfg, const std::filesystem::path& dir, Stage& stage) {
    const bool write = !dir.empty();
    const auto params = cfg.params();
    const double lam = cfg.lambda_rate;
    auto emit = [&](const std::string& name, const std::string& text) {
        if (!write)
            return;
        write_text(dir / name, text);
        rec.artifacts[name.substr(0, name.find('.')) + (name.ends_with(".svg") ? "_svg" : "")] = name;
    };

    // curvature
    if (!stage("curvature", [&] {
            const auto table = curvature_table(cfg);
            emit("curvature.csv", table.str());
            const auto start = analytic_geodesic_eval(params, 0.0).point;
            rec.ricci_scalar = ricci_scalar_at(start);
            const double expected = -3.0 * cfg.N;
            std::mt19937_64 rng(cfg.rng_seed);
            double worst = std::abs(rec.ricci_scalar - expected);
            for (int i = 0; i < cfg.curvature_samples; ++i)
                worst = std::max(worst, std::abs(ricci_scalar_at(random_point(cfg.N, rng)) - expected));
            double fd_rel = 0.0;
            for (int i = 0; i < 3; ++i) {
                const auto p = random_point(cfg.N, rng);
                fd_rel = std::max(fd_rel, std::abs(oracle::fd_ricci_scalar(p, 1e-4 * p.min_sigma()) - expected) /
                                              std::abs(expected));
            }
            rec.details["curvature"] = {{"ricci_scalar", rec.ricci_scalar},
                                        {"expected", expected},
                                        {"random_points", cfg.curvature_samples},
                                        {"max_abs_deviation", worst},
                                        {"fd_max_rel_error", fd_rel}};
        }))
        return;

    // geodesic
    dynamics::GeodesicTrajectory geo;
    if (!stage("geodesic", [&] {
            geo = numeric_geodesic(cfg);
            emit("geodesic.csv", geodesic_table(geo).str());
            const double speed = 6.0 * cfg.N * lam * lam;
            double err_window = 0.0, err_full = 0.0, drift = 0.0;
            for (std::size_t i = 0; i < geo.states.size(); ++i) {
                const auto exact = analytic_geodesic_eval(params, geo.tau_grid[i]);
                double e = 0.0;
                for (std::size_t k = 0; k < exact.point.block_count(); ++k)
                    e = std::max({e, std::abs(exact.point[k].mu - geo.states[i].point[k].mu),
                                  std::abs(exact.point[k].sigma - geo.states[i].point[k].sigma)});
                err_full = std::max(err_full, e);
                if (geo.tau_grid[i] <= cfg.jlc_check_window.hi)
                    err_window = std::max(err_window, e);
                const double s = metric_norm_sq(geo.states[i].point, geo.states[i].velocity);
                drift = std::max(drift, std::abs(s - speed) / speed);
            }
            rec.details["geodesic"] = {{"status", dynamics::status_name(geo.status)},
                                       {"accepted_steps", geo.stats.accepted_steps},
                                       {"rejected_steps", geo.stats.rejected_steps},
                                       {"max_local_error", geo.stats.max_local_error},
                                       {"check_window", {cfg.jlc_check_window.lo, cfg.jlc_check_window.hi}},
                                       {"sup_error_check_window", err_window},
                                       {"sup_error_full", err_full},
                                       {"expected_speed_sq", speed},
                                       {"max_rel_speed_drift", drift}};
        }))
        return;

    // entropy
    stage("entropy", [&] {
        const auto series = entropy_series(cfg);
        emit("entropy.csv", entropy_table(series).str());
        const auto summary = entropy_summary(cfg, series);
        rec.entropy_slope = summary["slope"].get<double>();
        rec.slope_ratio = summary["slope_ratio"].get<double>();
        rec.details["entropy"] = summary;
        if (write && cfg.emit_svg) {
            std::vector<double> ref(series.tau_grid.size());
            for (std::size_t i = 0; i < ref.size(); ++i)
                ref[i] = 3.0 * cfg.N * lam * series.tau_grid[i];
            emit("entropy.svg",
                 svg_line_chart("information-geometric entropy, N = " + std::to_string(cfg.N) +
                                    ", lambda = " + fd(lam),
                                "tau", "S = log avg volume",
                                {{"S(tau)", series.tau_grid, series.entropy}, {"3 N lambda tau", series.tau_grid, ref}}));
        }
    });

    // Jacobi field
    stage("jacobi", [&] {
        const auto jlc = numeric_jacobi(cfg, geo);
        emit("jacobi.csv", jacobi_table(jlc).str());
        const auto orc = dynamics::jacobi_fd_oracle(params, cfg.delta_lambda, jlc.tau_grid);
        double rel_window = 0.0, rel_full = 0.0;
        for (std::size_t i = 0; i < jlc.intensities.size(); ++i) {
            const double r = std::abs(jlc.intensities[i] - orc.intensities[i]) / orc.intensities[i];
            rel_full = std::max(rel_full, r);
            if (jlc.tau_grid[i] <= cfg.jlc_check_window.hi)
                rel_window = std::max(rel_window, r);
        }
        std::vector<double> logj;
        for (double v : jlc.intensities)
            logj.push_back(std::log(v));
        const auto fit = slope_fit(jlc.tau_grid, logj, cfg.lyapunov_window);
        const double lyap_oracle = dynamics::lyapunov_estimate(orc.tau_grid, orc.intensities, cfg.lyapunov_window);
        rec.lyapunov = fit.slope;
        rec.lyapunov_ratio = fit.slope / lam;
        const double prefactor = std::exp(fit.intercept) / cfg.delta_lambda;
        const double sqrt_form = std::sqrt(3.0 * cfg.N) * cfg.Lambda / (2.0 * lam * lam);
        rec.details["jacobi"] = {{"status", dynamics::status_name(jlc.status)},
                                 {"message", jlc.message},
                                 {"samples", jlc.tau_grid.size()},
                                 {"delta_lambda", cfg.delta_lambda},
                                 {"initial_intensity", jlc.intensities.front()},
                                 {"check_window", {cfg.jlc_check_window.lo, cfg.jlc_check_window.hi}},
                                 {"oracle_max_rel_check_window", rel_window},
                                 {"oracle_max_rel_full", rel_full},
                                 {"geodesic_mismatch", jlc.geodesic_mismatch},
                                 {"lyapunov_window", {cfg.lyapunov_window.lo, cfg.lyapunov_window.hi}},
                                 {"lyapunov", fit.slope},
                                 {"lyapunov_oracle", lyap_oracle},
                                 {"lyapunov_r_squared", fit.r_squared},
                                 {"prefactor_measured", prefactor},
                                 {"prefactor_sqrt3N_form", sqrt_form},
                                 {"prefactor_ratio_to_sqrt3N_form", prefactor / sqrt_form},
                                 {"prefactor_ratio_to_3N", prefactor / (3.0 * cfg.N)}};
        if (write && cfg.emit_svg)
            emit("jacobi.svg", svg_line_chart("Jacobi field intensity, N = " + std::to_string(cfg.N) +
                                                  ", lambda = " + fd(lam),
                                              "tau", "log |J|",
                                              {{"JLC integration", jlc.tau_grid, logj},
                                               {"family oracle", orc.tau_grid, [&] {
                                                    std::vector<double> v;
                                                    for (double x : orc.intensities)
                                                        v.push_back(std::log(x));
                                                    return v;
                                                }()}}));
    });
}

}  // namespace

RunRecord run_experiment(const ExperimentConfig& effective, const ResolvedConfig& cfg,
                         const std::filesystem::path& dir) {
    const auto t0 = std::chrono::steady_clock::now();
    RunRecord rec;
    rec.config = to_json(cfg);
    rec.effective = to_json(effective);
    rec.N = cfg.N;
    rec.lambda_rate = cfg.lambda_rate;
    rec.details = json::object();
    Stage stage{rec};

    const bool write = !dir.empty();
    const bool dir_ok = !write || stage("output", [&] {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec)
            throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
        write_text(dir / "config.json", rec.effective.dump(2) + "\n");
        rec.artifacts["config"] = "config.json";
    });
    if (dir_ok)
        run_stages(rec, cfg, dir, stage);
    rec.ok = rec.error_chain.empty();
    if (!rec.ok) {
        rec.ricci_scalar = rec.details.contains("curvature") ? rec.ricci_scalar : std::nan("");
        if (!rec.details.contains("entropy"))
            rec.entropy_slope = rec.slope_ratio = std::nan("");
        if (!rec.details.contains("jacobi"))
            rec.lyapunov = rec.lyapunov_ratio = std::nan("");
    }
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (write && dir_ok) {
        stage("output", [&] {
            rec.artifacts["record"] = "record.json";
            rec.artifacts["timing"] = "timing.json";
            write_text(dir / "timing.json", json{{"wall_seconds", rec.wall_seconds}}.dump(2) + "\n");
            write_text(dir / "record.json", rec.to_json().dump(2) + "\n");
        });
        rec.ok = rec.error_chain.empty();
    }
    return rec;
}

RunRecord run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
    validate(config);
    return run_experiment(config, resolve(config), out_dir);
}

std::string run_directory_name(int N, double lambda_rate) {
    return "N" + std::to_string(N) + "_lambda" + format_double(lambda_rate);
}

bool SweepResult::all_ok() const {
    for (const auto& r : records)
        if (!r.ok)
            return false;
    return true;
}

SweepResult run_sweep(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
    if (config.sweep_N.empty() || config.sweep_lambda.empty())
        throw DomainError("a sweep needs non-empty sweep_N and sweep_lambda lists");
    validate(config);

    struct Job {
        int N;
        double lambda;
    };
    std::vector<Job> jobs;
    for (int n : config.sweep_N)
        for (double l : config.sweep_lambda)
            jobs.push_back({n, l});

    SweepResult result;
    result.records.resize(jobs.size());
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers =
        std::min<std::size_t>(jobs.size(), config.workers > 0 ? static_cast<std::size_t>(config.workers) : hw);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            const auto& j = jobs[i];
            ExperimentConfig one = config;
            one.N = j.N;
            one.lambda_rate = j.lambda;
            one.sweep_N.clear();
            one.sweep_lambda.clear();
            const auto dir = out_dir.empty() ? out_dir : out_dir / run_directory_name(j.N, j.lambda);
            try {
                result.records[i] = run_experiment(one, resolve_for(config, j.N, j.lambda), dir);
            } catch (const std::exception& e) {
                // this pair cannot be resolved; record it and keep going
                auto& rec = result.records[i];
                rec.effective = to_json(one);
                rec.config = json::object();
                rec.N = j.N;
                rec.lambda_rate = j.lambda;
                rec.error_kind = dynamic_cast<const DomainError*>(&e) ? ErrorKind::Validation : ErrorKind::Internal;
                rec.error_chain = {std::string("config: ") + e.what()};
                rec.ricci_scalar = rec.entropy_slope = rec.slope_ratio = rec.lyapunov = rec.lyapunov_ratio =
                    std::nan("");
                rec.details = json::object();
                if (!dir.empty()) {
                    std::error_code ec;
                    std::filesystem::create_directories(dir, ec);
                    rec.artifacts["record"] = "record.json";
                    try {
                        write_text(dir / "record.json", rec.to_json().dump(2) + "\n");
                    } catch (const IoError& io) {
                        rec.artifacts.clear();
                        rec.error_chain.push_back(std::string("output: ") + io.what());
                    }
                }
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(worker);
    }

    result.summary = {{"N", "lambda", "ricci", "slope", "slope_ratio", "lyapunov", "lyapunov_ratio", "status"}, {}};
    for (const auto& r : result.records)
        result.summary.add({std::to_string(r.N), format_double(r.lambda_rate), format_double(r.ricci_scalar),
                            format_double(r.entropy_slope), format_double(r.slope_ratio), format_double(r.lyapunov),
                            format_double(r.lyapunov_ratio), r.ok ? "ok" : error_kind_name(r.error_kind)});
    if (!out_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec)
            throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());
        write_text(out_dir / "summary.csv", result.summary.str());
        json runs = json::array();
        for (const auto& r : result.records)
            runs.push_back({{"N", r.N},
                            {"lambda", r.lambda_rate},
                            {"ok", r.ok},
                            {"record", run_directory_name(r.N, r.lambda_rate) + "/record.json"}});
        write_text(out_dir / "sweep.json",
                   json{{"schema_version", kSchemaVersion}, {"config", to_json(config)}, {"runs", runs}}.dump(2) +
                       "\n");
    }
    return result;
}

}  // namespace igchaos::runner
