#pragma once

// Numeric geodesic flow and geodesic deviation on the Gaussian manifold.
//
// Geodesics are integrated per block in the state (mu, sigma, dmu, dsigma).
// The Jacobi-Levi-Civita system is carried in the covariant form
//   dJ/dtau = P - Gamma(u, J),   dP/dtau = -Gamma(u, P) - R(u, J) u
// with P = DJ/dtau, integrated jointly with the geodesic it rides on.

#include <span>
#include <string>
#include <vector>

#include "core/fit.hpp"
#include "core/manifold.hpp"

namespace igchaos::dynamics {

enum class TrajectoryStatus { Complete, StepUnderflow, SigmaCollapse, NonFinite, Overflow };

const char* status_name(TrajectoryStatus s);

struct IntegratorStats {
    long accepted_steps = 0;
    long rejected_steps = 0;
    double max_local_error = 0.0;  // normalized; <= 1 for accepted steps
};

struct GeodesicTrajectory {
    std::vector<double> tau_grid;
    std::vector<GeodesicSample> states;
    IntegratorStats stats;
    TrajectoryStatus status = TrajectoryStatus::Complete;
    std::string message;

    bool complete() const { return status == TrajectoryStatus::Complete; }
};

/// Integrate the geodesic equations from `initial` and sample at every tau in
/// `tau_grid` (strictly increasing, starting at the initial tau).
GeodesicTrajectory integrate_geodesic(const GeodesicSample& initial, std::span<const double> tau_grid,
                                      double rel_tol);

/// Uniform sampling of [0, tau_end] with `samples` points.
GeodesicTrajectory integrate_geodesic(const GeodesicSample& initial, double tau_end, double rel_tol,
                                      int samples = 101);

struct JacobiInitial {
    TangentVector deviation;  // J at the first sample
    TangentVector rate;       // DJ/dtau at the first sample
};

struct JacobiTrajectory {
    std::vector<double> tau_grid;
    std::vector<TangentVector> deviations;
    std::vector<TangentVector> covariant_rates;
    std::vector<double> intensities;
    IntegratorStats stats;
    TrajectoryStatus status = TrajectoryStatus::Complete;
    std::string message;
    /// Sup-norm distance between the geodesic re-integrated alongside the
    /// deviation and the supplied geodesic samples.
    double geodesic_mismatch = 0.0;

    bool complete() const { return status == TrajectoryStatus::Complete; }
};

/// Intensity above which JLC integration stops with an Overflow tag.
inline constexpr double kIntensityOverflow = 1e300;

JacobiTrajectory integrate_jlc(const GeodesicTrajectory& geodesic, const JacobiInitial& initial,
                               double rel_tol);

/// Jacobi field of the closed-form family in lambda by central differences:
/// J = [Theta(lambda + d) - Theta(lambda - d)] / 2, covariant rate from a
/// central tau-difference of J plus the connection term.
JacobiTrajectory jacobi_fd_oracle(const GeodesicParams& params, double delta_lambda,
                                  std::span<const double> tau_grid);

/// Initial data of the oracle field at tau, for seeding integrate_jlc.
JacobiInitial jacobi_fd_initial(const GeodesicParams& params, double delta_lambda, double tau = 0.0);

/// (g_ab J^a J^b)^(1/2)
double jacobi_intensity(const TangentVector& deviation, const ThetaPoint& at);

/// Least-squares slope of log intensity against tau over the window.
double lyapunov_estimate(std::span<const double> tau, std::span<const double> intensities, Window window);

/// (1/tau) ln(|J(tau)| / |J(tau_0)|) per sample; NaN at tau == tau_0.
std::vector<double> running_rate(std::span<const double> tau, std::span<const double> intensities);

}  // namespace igchaos::dynamics
