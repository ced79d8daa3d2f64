#include "runner/verify.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "core/dynamics.hpp"
#include "core/entropy.hpp"
#include "core/maxent.hpp"
#include "core/oracle.hpp"
#include "runner/output.hpp"

namespace igchaos::runner {

bool VerifyReport::all_passed() const {
    for (const auto& c : checks)
        if (!c.passed)
            return false;
    return true;
}

std::vector<std::string> VerifyReport::failed_components() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
        if (!c.passed)
            out.push_back(c.component);
    return out;
}

nlohmann::json VerifyReport::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks)
        arr.push_back({{"name", c.name},
                       {"component", c.component},
                       {"tolerance", c.tolerance},
                       {"measured", c.measured},
                       {"passed", c.passed}});
    return {{"all_passed", all_passed()}, {"checks", arr}};
}

std::string VerifyReport::text() const {
    std::string out;
    char buf[512];
    for (const auto& c : checks) {
        std::snprintf(buf, sizeof buf, "[%s] %-34s %-40s measured %-12.4g tolerance %.3g\n",
                      c.passed ? "PASS" : "FAIL", c.name.c_str(), c.component.c_str(), c.measured, c.tolerance);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "%zu checks, %s\n", checks.size(), all_passed() ? "all passed" : "FAILURES");
    out += buf;
    return out;
}

namespace {

ThetaPoint random_point(int N, std::mt19937_64& rng, double sigma_lo = 0.1, double sigma_hi = 10.0) {
    std::uniform_real_distribution<double> mu(-10.0, 10.0);
    std::uniform_real_distribution<double> log_sigma(std::log(sigma_lo), std::log(sigma_hi));
    std::vector<Block> b(static_cast<std::size_t>(3 * N));
    for (auto& blk : b)
        blk = {mu(rng), std::exp(log_sigma(rng))};
    return ThetaPoint(std::move(b));
}

struct Recorder {
    VerifyReport& report;
    void operator()(std::string name, std::string component, double tolerance, double measured) {
        report.checks.push_back({std::move(name), std::move(component), tolerance, measured,
                                 std::isfinite(measured) && measured <= tolerance});
    }
};

std::vector<double> uniform_grid(double end, int samples) {
    std::vector<double> g(samples);
    for (int i = 0; i < samples; ++i)
        g[i] = end * i / (samples - 1);
    g.back() = end;
    return g;
}

}  // namespace

VerifyReport run_verification(const VerifyOptions& options) {
    VerifyReport report;
    Recorder check{report};
    std::mt19937_64 rng(options.rng_seed);

    // Fisher metric by quadrature
    {
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const auto p = random_point(1, rng);
            const auto q = oracle::fisher_metric_quadrature(p, {});
            const auto g = metric_at(p);
            for (std::size_t k = 0; k < g.size(); ++k)
                worst = std::max({worst, std::abs(q.blocks[k].g_mumu - g[k].g_mumu),
                                  std::abs(q.blocks[k].g_sigmasigma - g[k].g_sigmasigma), q.max_in_block_offdiag});
        }
        check("fisher_gauss_hermite_abs_error", "numgeo-oracle/fisher_metric_quadrature", 1e-10, worst);

        oracle::QuadratureSpec mc;
        mc.method = oracle::QuadratureMethod::MonteCarlo;
        mc.rng_seed = options.rng_seed;
        const auto p = ThetaPoint::uniform(1, {0.0, 1.0});
        const auto q = oracle::fisher_metric_quadrature(p, mc);
        double z = q.converged ? 0.0 : INFINITY;
        for (std::size_t k = 0; k < q.blocks.size(); ++k)
            z = std::max({z, std::abs(q.blocks[k].g_mumu - 1.0) / q.standard_errors[k].g_mumu,
                          std::abs(q.blocks[k].g_sigmasigma - 2.0) / q.standard_errors[k].g_sigmasigma});
        check("fisher_monte_carlo_stderr_multiple", "numgeo-oracle/fisher_metric_quadrature", 3.0, z);
    }

    // connection against finite differences
    {
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const auto p = random_point(1, rng);
            auto closed = christoffel_at(p);
            if (options.perturb_christoffel_sign)
                for (auto& g : closed)
                    g.sigma_mumu = -g.sigma_mumu;
            const auto fd = oracle::fd_christoffel(p, oracle::default_fd_step(p));
            for (std::size_t k = 0; k < closed.size(); ++k) {
                auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
                worst = std::max({worst, rel(closed[k].mu_musigma, fd[k].mu_musigma),
                                  rel(closed[k].sigma_mumu, fd[k].sigma_mumu),
                                  rel(closed[k].sigma_sigmasigma, fd[k].sigma_sigmasigma)});
            }
        }
        check("christoffel_vs_finite_difference", "gaussian-manifold/christoffel_at", 1e-5, worst);
    }

    // Ricci scalar: closed form exact, oracle to 1e-4
    {
        double exact_dev = 0.0, fd_rel = 0.0;
        for (int N : {1, 2, 5, 10}) {
            for (int i = 0; i < 1000; ++i)
                exact_dev = std::max(exact_dev, std::abs(ricci_scalar_at(random_point(N, rng)) + 3.0 * N));
            for (int i = 0; i < 3; ++i) {
                const auto p = random_point(N, rng);
                fd_rel = std::max(fd_rel, std::abs(oracle::fd_ricci_scalar(p, 1e-4 * p.min_sigma()) + 3.0 * N) / (3.0 * N));
            }
        }
        check("ricci_scalar_exact", "gaussian-manifold/ricci_scalar_at", 0.0, exact_dev);
        check("ricci_scalar_finite_difference", "numgeo-oracle/fd_ricci_scalar", 1e-4, fd_rel);
    }

    // sectional curvature and Riemann symmetries on the dense path
    {
        double sec = 0.0;
        double sym = 0.0;
        for (int i = 0; i < 3; ++i) {
            const auto p = random_point(1, rng, 0.5, 2.0);
            const double h = 1e-4 * p.min_sigma();
            std::vector<Plane> planes;
            for (std::size_t a = 0; a < p.dimension(); ++a)
                for (std::size_t b = a + 1; b < p.dimension(); ++b)
                    planes.push_back({a, b});
            const auto k = oracle::fd_sectional_dense(p, planes, h);
            for (std::size_t j = 0; j < planes.size(); ++j) {
                const bool in_block = planes[j].first / 2 == planes[j].second / 2;
                sec = std::max({sec, std::abs(k[j] - (in_block ? -0.5 : 0.0)),
                                std::abs(k[j] - sectional_curvature_at(p, planes[j]))});
            }
            const auto d = oracle::riemann_symmetry_defects(oracle::fd_riemann_dense(p, h));
            sym = std::max({sym, d.antisym_first_pair, d.antisym_second_pair, d.first_bianchi});
        }
        check("sectional_curvature_dense_oracle", "gaussian-manifold/sectional_curvature_at", 1e-5, sec);
        check("riemann_symmetries_dense", "numgeo-oracle/fd_riemann_dense", 1e-6, sym);
    }

    // geodesics
    {
        double residual = 0.0;
        for (auto [L, l] : {std::pair{std::sqrt(8.0), 1.0}, std::pair{1.0, 0.5}})
            for (double tau : {0.0, 0.5, 1.0, 5.0}) {
                GeodesicParams p;
                p.Lambda = L;
                p.lambda_rate = l;
                residual = std::max(residual, geodesic_ode_residual(p, tau));
            }
        check("analytic_geodesic_ode_residual", "gaussian-manifold/geodesic_ode_residual", 1e-6, residual);

        double sup = 0.0, speed = 0.0, jlc = 0.0, lyap = 0.0;
        for (double lam : {0.5, 1.0, 2.0}) {
            GeodesicParams p;
            p.lambda_rate = lam;
            const auto grid = uniform_grid(20.0 / lam, 201);
            const auto geo = dynamics::integrate_geodesic(analytic_geodesic_eval(p, 0.0), grid, 1e-10);
            if (!geo.complete()) {
                sup = speed = INFINITY;
                continue;
            }
            for (std::size_t i = 0; i < geo.states.size(); ++i) {
                const auto& s = geo.states[i];
                const double v = metric_norm_sq(s.point, s.velocity);
                speed = std::max(speed, std::abs(v - 6.0 * lam * lam) / (6.0 * lam * lam));
                if (grid[i] > 10.0 / lam)
                    continue;
                const auto e = analytic_geodesic_eval(p, grid[i]);
                for (std::size_t k = 0; k < e.point.block_count(); ++k)
                    sup = std::max({sup, std::abs(e.point[k].mu - s.point[k].mu),
                                    std::abs(e.point[k].sigma - s.point[k].sigma)});
            }
            const double dl = 1e-5 * lam;
            const auto j = dynamics::integrate_jlc(geo, dynamics::jacobi_fd_initial(p, dl), 1e-10);
            const auto o = dynamics::jacobi_fd_oracle(p, dl, grid);
            for (std::size_t i = 0; i < j.intensities.size() && grid[i] <= 10.0 / lam; ++i)
                jlc = std::max(jlc, std::abs(j.intensities[i] - o.intensities[i]) / o.intensities[i]);
            const double est = dynamics::lyapunov_estimate(j.tau_grid, j.intensities, {10.0 / lam, 20.0 / lam});
            lyap = std::max(lyap, std::abs(est - lam) / lam);
        }
        check("numeric_geodesic_sup_error", "dynamics/integrate_geodesic", 1e-8, sup);
        check("geodesic_speed_conservation", "dynamics/integrate_geodesic", 1e-8, speed);
        check("jlc_vs_family_oracle", "dynamics/integrate_jlc", 5e-3, jlc);
        check("lyapunov_rate", "dynamics/lyapunov_estimate", 2e-2, lyap);
    }

    // region volume and entropy growth
    {
        double rel = 0.0;
        for (double tau : {0.5, 1.0, 5.0, 20.0}) {
            GeodesicParams p;
            const double closed = entropy::log_region_volume(p, tau);
            const double quad = oracle::region_volume_quadrature(p, tau, 1e-10);
            // compare the volumes, not their logs
            rel = std::max(rel, std::abs(std::expm1(quad - closed)));
        }
        check("region_volume_vs_quadrature", "entropy/region_volume", 1e-9, rel);

        GeodesicParams p;
        std::vector<double> grid = uniform_grid(40.0, 401);
        grid.erase(grid.begin());
        const auto s = entropy::ig_entropy_series(p, grid);
        const auto fit = slope_fit(s.tau_grid, s.entropy, {20.0, 40.0});
        check("entropy_slope_N1", "entropy/ig_entropy_series", 2e-2, std::abs(fit.slope / 3.0 - 1.0));
    }

    // maximum entropy
    {
        const auto sol = maxent::maxent_solve({}, {0.0, 1.0});
        const auto ref = maxent::gaussian_reference(sol.distribution.grid, {0.0, 1.0});
        double sup = 0.0;
        for (std::size_t i = 0; i < ref.size(); ++i)
            if (std::abs(sol.distribution.grid[i]) <= 5.0)
                sup = std::max(sup, std::abs(sol.distribution.weights[i] - ref[i]) / ref[i]);
        check("maxent_vs_discrete_gaussian", "maxent/maxent_solve", 1e-3, sup);

        const auto sol2 = maxent::maxent_solve({}, {3.0, 0.5});
        const auto m = maxent::discrete_moments(sol2.distribution);
        check("maxent_moment_residual", "maxent/maxent_solve", 1e-10,
              std::max(std::abs(m.mean - 3.0), std::abs(m.variance - 0.25)));
    }
    return report;
}

}  // namespace igchaos::runner
