#include "core/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "core/errors.hpp"
#include "core/ode.hpp"

namespace igchaos::dynamics {

const char* status_name(TrajectoryStatus s) {
    switch (s) {
    case TrajectoryStatus::Complete:
        return "complete";
    case TrajectoryStatus::StepUnderflow:
        return "step_underflow";
    case TrajectoryStatus::SigmaCollapse:
        return "sigma_collapse";
    case TrajectoryStatus::NonFinite:
        return "non_finite";
    case TrajectoryStatus::Overflow:
        return "overflow";
    }
    return "unknown";
}

namespace {

constexpr std::size_t kGeoWidth = 4;  // mu, sigma, dmu, dsigma
constexpr std::size_t kJlcWidth = 8;  // geodesic state, then J_mu, J_sigma, P_mu, P_sigma

void check_rel_tol(double rel_tol) {
    if (!(rel_tol >= 1e-14 && rel_tol <= 1e-2))
        throw DomainError("rel_tol must lie in [1e-14, 1e-2]");
}

void check_grid(std::span<const double> tau_grid) {
    if (tau_grid.size() < 2)
        throw DomainError("tau grid needs at least 2 samples");
    for (std::size_t i = 0; i < tau_grid.size(); ++i) {
        if (!std::isfinite(tau_grid[i]))
            throw DomainError("tau grid must be finite");
        if (i > 0 && !(tau_grid[i] > tau_grid[i - 1]))
            throw DomainError("tau grid must be strictly increasing");
    }
}

// Gamma(u, v) contracted on both lower slots within one block.
TangentBlock connection(const BlockChristoffel& g, double umu, double usig, double vmu, double vsig) {
    return {g.mu_musigma * (umu * vsig + usig * vmu), g.sigma_mumu * umu * vmu + g.sigma_sigmasigma * usig * vsig};
}

void geodesic_block_rhs(const double* y, double* f) {
    const double sigma = y[1], umu = y[2], usig = y[3];
    const auto g = block_christoffel(sigma);
    const auto acc = connection(g, umu, usig, umu, usig);
    f[0] = umu;
    f[1] = usig;
    f[2] = -acc.dmu;
    f[3] = -acc.dsigma;
}

// R(J, u) u within one block; with constant sectional curvature K of the
// block this is K (|u|^2 J - g(u, J) u).
TangentBlock curvature_term(double sigma, double umu, double usig, double jmu, double jsig) {
    const auto m = block_metric(sigma);
    const double K = block_riemann(sigma).r_musigmamusigma / (m.g_mumu * m.g_sigmasigma);
    const double uu = m.g_mumu * umu * umu + m.g_sigmasigma * usig * usig;
    const double uj = m.g_mumu * umu * jmu + m.g_sigmasigma * usig * jsig;
    return {K * (uu * jmu - uj * umu), K * (uu * jsig - uj * usig)};
}

void jlc_block_rhs(const double* y, double* f) {
    geodesic_block_rhs(y, f);
    const double sigma = y[1], umu = y[2], usig = y[3];
    const double jmu = y[4], jsig = y[5], pmu = y[6], psig = y[7];
    const auto g = block_christoffel(sigma);
    const auto gj = connection(g, umu, usig, jmu, jsig);
    const auto gp = connection(g, umu, usig, pmu, psig);
    const auto rj = curvature_term(sigma, umu, usig, jmu, jsig);
    f[4] = pmu - gj.dmu;
    f[5] = psig - gj.dsigma;
    f[6] = -gp.dmu - rj.dmu;
    f[7] = -gp.dsigma - rj.dsigma;
}

// sqrt(sum c_i^2) over the orthonormal components J_mu/sigma, sqrt(2) J_sigma/sigma,
// scaled by the largest one so the sum cannot overflow before the true norm does
template <class Component>
double scaled_norm(std::size_t blocks, Component component) {
    double scale = 0.0;
    for (std::size_t k = 0; k < blocks; ++k) {
        const auto [a, b] = component(k);
        scale = std::max({scale, std::abs(a), std::abs(b)});
    }
    if (scale == 0.0 || !std::isfinite(scale))
        return scale;
    double s = 0.0;
    for (std::size_t k = 0; k < blocks; ++k) {
        const auto [a, b] = component(k);
        s += (a / scale) * (a / scale) + (b / scale) * (b / scale);
    }
    return scale * std::sqrt(s);
}

double intensity_from_state(std::span<const double> y, std::size_t blocks) {
    return scaled_norm(blocks, [&](std::size_t k) {
        const double* b = y.data() + kJlcWidth * k;
        return std::pair{b[4] / b[1], std::sqrt(2.0) * b[5] / b[1]};
    });
}

std::string sigma_guard(std::span<const double> y, std::size_t width, double t) {
    for (std::size_t i = 1; i < y.size(); i += width)
        if (!(y[i] > 0.0))
            return "sigma collapsed to " + std::to_string(y[i]) + " at tau = " + std::to_string(t);
    return {};
}

IntegratorStats convert(const ode::Stats& s) {
    return {s.accepted, s.rejected, s.max_error_estimate};
}

TrajectoryStatus classify(ode::Status s, TrajectoryStatus halted_as) {
    switch (s) {
    case ode::Status::Ok:
        return TrajectoryStatus::Complete;
    case ode::Status::StepUnderflow:
        return TrajectoryStatus::StepUnderflow;
    case ode::Status::NonFinite:
        return TrajectoryStatus::NonFinite;
    case ode::Status::Halted:
        return halted_as;
    }
    return TrajectoryStatus::NonFinite;
}

GeodesicSample unpack_geodesic(std::span<const double> y, std::size_t width) {
    const std::size_t blocks = y.size() / width;
    std::vector<Block> pts(blocks);
    std::vector<TangentBlock> vel(blocks);
    for (std::size_t k = 0; k < blocks; ++k) {
        const double* b = y.data() + width * k;
        pts[k] = {b[0], b[1]};
        vel[k] = {b[2], b[3]};
    }
    return {ThetaPoint(std::move(pts)), TangentVector(std::move(vel))};
}

}  // namespace

GeodesicTrajectory integrate_geodesic(const GeodesicSample& initial, std::span<const double> tau_grid,
                                      double rel_tol) {
    check_rel_tol(rel_tol);
    check_grid(tau_grid);
    const std::size_t blocks = initial.point.block_count();
    if (initial.velocity.block_count() != blocks)
        throw DomainError("initial velocity must have one entry per block");

    std::vector<double> y0(kGeoWidth * blocks);
    for (std::size_t k = 0; k < blocks; ++k) {
        const auto& b = initial.point[k];
        const auto& v = initial.velocity[k];
        if (!std::isfinite(b.mu) || !std::isfinite(v.dmu) || !std::isfinite(v.dsigma))
            throw DomainError("initial state must be finite");
        y0[kGeoWidth * k + 0] = b.mu;
        y0[kGeoWidth * k + 1] = b.sigma;
        y0[kGeoWidth * k + 2] = v.dmu;
        y0[kGeoWidth * k + 3] = v.dsigma;
    }

    const ode::Rhs rhs = [blocks](double, std::span<const double> y, std::span<double> f) {
        for (std::size_t k = 0; k < blocks; ++k)
            geodesic_block_rhs(y.data() + kGeoWidth * k, f.data() + kGeoWidth * k);
    };
    const ode::StepGuard guard = [](double t, std::span<const double> y) {
        return sigma_guard(y, kGeoWidth, t);
    };
    const auto traj = ode::integrate(rhs, y0, tau_grid, {rel_tol, 1e-300}, guard);

    GeodesicTrajectory out;
    out.tau_grid = traj.times;
    out.states.reserve(traj.states.size());
    for (const auto& y : traj.states)
        out.states.push_back(unpack_geodesic(y, kGeoWidth));
    out.stats = convert(traj.stats);
    out.status = classify(traj.status, TrajectoryStatus::SigmaCollapse);
    out.message = traj.message;
    return out;
}

GeodesicTrajectory integrate_geodesic(const GeodesicSample& initial, double tau_end, double rel_tol,
                                      int samples) {
    if (!(tau_end > 0.0) || !std::isfinite(tau_end))
        throw DomainError("tau_end must be finite and > 0");
    if (samples < 2)
        throw DomainError("need at least 2 samples");
    std::vector<double> grid(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i)
        grid[i] = tau_end * i / (samples - 1);
    grid.back() = tau_end;
    return integrate_geodesic(initial, grid, rel_tol);
}

double jacobi_intensity(const TangentVector& deviation, const ThetaPoint& at) {
    if (deviation.block_count() != at.block_count())
        throw DomainError("deviation and point must have the same block count");
    return scaled_norm(at.block_count(), [&](std::size_t k) {
        return std::pair{deviation[k].dmu / at[k].sigma, std::sqrt(2.0) * deviation[k].dsigma / at[k].sigma};
    });
}

JacobiTrajectory integrate_jlc(const GeodesicTrajectory& geodesic, const JacobiInitial& initial,
                               double rel_tol) {
    check_rel_tol(rel_tol);
    if (geodesic.states.size() < 2 || geodesic.states.size() != geodesic.tau_grid.size())
        throw DomainError("JLC integration needs a geodesic with at least 2 samples");
    check_grid(geodesic.tau_grid);
    const auto& first = geodesic.states.front();
    const std::size_t blocks = first.point.block_count();
    if (initial.deviation.block_count() != blocks || initial.rate.block_count() != blocks)
        throw DomainError("initial deviation and rate must match the geodesic block count");

    std::vector<double> y0(kJlcWidth * blocks);
    for (std::size_t k = 0; k < blocks; ++k) {
        double* b = y0.data() + kJlcWidth * k;
        b[0] = first.point[k].mu;
        b[1] = first.point[k].sigma;
        b[2] = first.velocity[k].dmu;
        b[3] = first.velocity[k].dsigma;
        b[4] = initial.deviation[k].dmu;
        b[5] = initial.deviation[k].dsigma;
        b[6] = initial.rate[k].dmu;
        b[7] = initial.rate[k].dsigma;
    }
    for (double v : y0)
        if (!std::isfinite(v))
            throw DomainError("initial JLC state must be finite");

    const ode::Rhs rhs = [blocks](double, std::span<const double> y, std::span<double> f) {
        for (std::size_t k = 0; k < blocks; ++k)
            jlc_block_rhs(y.data() + kJlcWidth * k, f.data() + kJlcWidth * k);
    };
    TrajectoryStatus halted_as = TrajectoryStatus::SigmaCollapse;
    const ode::StepGuard guard = [&halted_as, blocks](double t, std::span<const double> y) {
        auto why = sigma_guard(y, kJlcWidth, t);
        if (!why.empty()) {
            halted_as = TrajectoryStatus::SigmaCollapse;
            return why;
        }
        const double j = intensity_from_state(y, blocks);
        if (!(j <= kIntensityOverflow)) {
            halted_as = TrajectoryStatus::Overflow;
            return "Jacobi intensity exceeded 1e300 at tau = " + std::to_string(t);
        }
        return std::string{};
    };
    const auto traj = ode::integrate(rhs, y0, geodesic.tau_grid, {rel_tol, 1e-300}, guard);

    JacobiTrajectory out;
    out.tau_grid = traj.times;
    out.stats = convert(traj.stats);
    out.status = classify(traj.status, halted_as);
    out.message = traj.message;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const auto& y = traj.states[i];
        std::vector<TangentBlock> dev(blocks), rate(blocks);
        for (std::size_t k = 0; k < blocks; ++k) {
            const double* b = y.data() + kJlcWidth * k;
            dev[k] = {b[4], b[5]};
            rate[k] = {b[6], b[7]};
            const auto& ref = geodesic.states[i];
            out.geodesic_mismatch =
                std::max({out.geodesic_mismatch, std::abs(b[0] - ref.point[k].mu),
                          std::abs(b[1] - ref.point[k].sigma), std::abs(b[2] - ref.velocity[k].dmu),
                          std::abs(b[3] - ref.velocity[k].dsigma)});
        }
        out.intensities.push_back(intensity_from_state(y, blocks));
        out.deviations.emplace_back(std::move(dev));
        out.covariant_rates.emplace_back(std::move(rate));
    }
    return out;
}

namespace {

void check_delta(const GeodesicParams& params, double delta_lambda) {
    params.validate();
    const double l = params.lambda_rate;
    if (!(delta_lambda >= 1e-8 * l && delta_lambda <= 1e-3 * l))
        throw DomainError("delta_lambda must lie in [1e-8, 1e-3] * lambda");
}

// Half the difference of the two neighbouring family members, per block.
std::vector<TangentBlock> family_difference(const GeodesicParams& params, double delta, double tau) {
    GeodesicParams hi = params, lo = params;
    hi.lambda_rate += delta;
    lo.lambda_rate -= delta;
    const auto a = analytic_geodesic_eval(hi, tau);
    const auto b = analytic_geodesic_eval(lo, tau);
    std::vector<TangentBlock> j(a.point.block_count());
    for (std::size_t k = 0; k < j.size(); ++k)
        j[k] = {0.5 * (a.point[k].mu - b.point[k].mu), 0.5 * (a.point[k].sigma - b.point[k].sigma)};
    return j;
}

}  // namespace

JacobiInitial jacobi_fd_initial(const GeodesicParams& params, double delta_lambda, double tau) {
    check_delta(params, delta_lambda);
    const double h = 1e-3 / params.lambda_rate;
    const auto j = family_difference(params, delta_lambda, tau);
    const auto jp = family_difference(params, delta_lambda, tau + h);
    const auto jm = family_difference(params, delta_lambda, tau - h);
    const auto base = analytic_geodesic_eval(params, tau);
    std::vector<TangentBlock> rate(j.size());
    for (std::size_t k = 0; k < j.size(); ++k) {
        const auto g = block_christoffel(base.point[k].sigma);
        const auto& u = base.velocity[k];
        const auto gj = connection(g, u.dmu, u.dsigma, j[k].dmu, j[k].dsigma);
        rate[k] = {(jp[k].dmu - jm[k].dmu) / (2.0 * h) + gj.dmu,
                   (jp[k].dsigma - jm[k].dsigma) / (2.0 * h) + gj.dsigma};
    }
    return {TangentVector(j), TangentVector(std::move(rate))};
}

JacobiTrajectory jacobi_fd_oracle(const GeodesicParams& params, double delta_lambda,
                                  std::span<const double> tau_grid) {
    check_delta(params, delta_lambda);
    check_grid(tau_grid);
    JacobiTrajectory out;
    for (double tau : tau_grid) {
        auto init = jacobi_fd_initial(params, delta_lambda, tau);
        const auto base = analytic_geodesic_eval(params, tau);
        out.tau_grid.push_back(tau);
        out.intensities.push_back(jacobi_intensity(init.deviation, base.point));
        out.deviations.push_back(std::move(init.deviation));
        out.covariant_rates.push_back(std::move(init.rate));
    }
    return out;
}

double lyapunov_estimate(std::span<const double> tau, std::span<const double> intensities, Window window) {
    if (tau.size() != intensities.size())
        throw DomainError("tau and intensity series must have equal length");
    std::vector<double> t, logj;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        if (tau[i] < window.lo || tau[i] > window.hi)
            continue;
        if (!(intensities[i] > 0.0) || !std::isfinite(intensities[i]))
            throw DomainError("intensities in the fit window must be finite and > 0");
        t.push_back(tau[i]);
        logj.push_back(std::log(intensities[i]));
    }
    return slope_fit(t, logj, window).slope;
}

std::vector<double> running_rate(std::span<const double> tau, std::span<const double> intensities) {
    if (tau.size() != intensities.size() || tau.empty())
        throw DomainError("tau and intensity series must be non-empty and of equal length");
    std::vector<double> out(tau.size());
    const double t0 = tau.front();
    const double j0 = intensities.front();
    for (std::size_t i = 0; i < tau.size(); ++i) {
        const double dt = tau[i] - t0;
        out[i] = dt == 0.0 ? std::numeric_limits<double>::quiet_NaN() : std::log(intensities[i] / j0) / dt;
    }
    return out;
}

}  // namespace igchaos::dynamics
