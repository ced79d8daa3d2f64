#pragma once

// Geodesic-region volumes and the information-geometric entropy built on them.
//
// All volumes are carried as natural logarithms: for 3N blocks the region
// volume scales like exp(3N lambda tau) and leaves double range quickly.

#include <span>
#include <vector>

#include "core/manifold.hpp"

namespace igchaos::entropy {

/// Riemannian volume element sqrt(det g) at a point.
double volume_element(const ThetaPoint& point);
double log_volume_element(const ThetaPoint& point);

/// log of one block's region factor |mu(tau) - mu(0)| * sqrt(2) |1/sigma(0) - 1/sigma(tau)|.
double block_log_region_factor(const BlockConstants& constants, double tau);

/// log of the volume swept by the geodesic over [0, tau] (tau > 0).
double log_region_volume(const GeodesicParams& params, double tau);

/// log of (1/tau) * integral_0^tau V(t) dt by refined Simpson quadrature,
/// starting from quad_points (>= 16) subintervals.
double averaged_log_volume(const GeodesicParams& params, double tau, int quad_points = 64);

struct VolumeSeries {
    std::vector<double> tau_grid;
    std::vector<double> log_region_volume;
    std::vector<double> log_avg_volume;
    std::vector<double> entropy;  // equals log_avg_volume
};

/// Series over a strictly increasing tau_grid of positive values. The running
/// integral is accumulated segment by segment, so the cost does not grow with
/// the number of samples.
VolumeSeries ig_entropy_series(const GeodesicParams& params, std::span<const double> tau_grid,
                               int quad_points = 64);

}  // namespace igchaos::entropy
