#include "core/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "core/errors.hpp"

namespace igchaos::entropy {

double log_volume_element(const ThetaPoint& point) {
    // det g = prod 2 / sigma^4
    double s = 0.0;
    for (const auto& b : point.blocks())
        s += std::log(2.0) - 4.0 * std::log(b.sigma);
    return 0.5 * s;
}

double volume_element(const ThetaPoint& point) {
    return std::exp(log_volume_element(point));
}

double block_log_region_factor(const BlockConstants& c, double tau) {
    if (!(c.B > 0.0) || !(c.beta > 0.0))
        throw DomainError("block constants need B > 0 and beta > 0");
    if (!(tau > 0.0))
        throw DomainError("region volume needs tau > 0");
    const double bt = c.beta * tau;
    if (!(bt <= 700.0))
        throw DomainError("beta * tau exceeds the representable range of the closed form");
    const double k = c.B * c.B / (8.0 * c.beta * c.beta);
    const double w = std::exp(-bt);
    const double ew = std::exp(bt);
    // mu(tau) - mu(0) = (B^2 / 2 beta) (1 - w^2) / ((w^2 + k)(1 + k)), with 1/(w^2 + k) = e^bt / q
    const double q = w + k * ew;
    const double dmu = (c.B * c.B / (2.0 * c.beta)) * (-std::expm1(-2.0 * bt)) * (ew / q) / (1.0 + k);
    // 1/sigma(tau) - 1/sigma(0) = (q(tau) - q(0)) / B
    const double dinv = (k * std::expm1(bt) + std::expm1(-bt)) / c.B;
    return std::log(std::abs(dmu)) + std::log(std::numbers::sqrt2 * std::abs(dinv));
}

namespace {

struct BlockRun {
    BlockConstants constants;
    int count;
};

// identical blocks contribute identical factors; evaluate each distinct one once
std::vector<BlockRun> collapse(const GeodesicParams& params) {
    std::vector<BlockRun> runs;
    for (const auto& c : params.block_constants()) {
        if (!runs.empty() && runs.back().constants.B == c.B && runs.back().constants.beta == c.beta)
            ++runs.back().count;
        else
            runs.push_back({c, 1});
    }
    return runs;
}

double log_region(const std::vector<BlockRun>& runs, double tau) {
    if (tau == 0.0)
        return -std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (const auto& r : runs)
        s += r.count * block_log_region_factor(r.constants, tau);
    return s;
}

// log of the integral of the region volume over [a, b] by Simpson's rule,
// doubling the panel count until the log estimate settles
double log_integral(const std::vector<BlockRun>& runs, double a, double b, int panels) {
    int n = panels + panels % 2;
    std::vector<double> logs(n + 1);
    for (int i = 0; i <= n; ++i)
        logs[i] = log_region(runs, a + (b - a) * i / n);

    constexpr double kTol = 1e-11;
    constexpr int kMaxPanels = 1 << 22;
    double previous = std::numeric_limits<double>::quiet_NaN();
    for (;;) {
        const double m = *std::max_element(logs.begin(), logs.end());
        // trapezoid sums at spacing h and 2h, combined into Simpson's rule
        double all = 0.0, even = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double e = std::exp(logs[i] - m);
            const double end_weight = (i == 0 || i == n) ? 0.5 : 1.0;
            all += end_weight * e;
            if (i % 2 == 0)
                even += end_weight * e;
        }
        const double h = (b - a) / n;
        const double estimate = m + std::log((4.0 * all - 2.0 * even) * h / 3.0);
        if (std::abs(estimate - previous) < kTol || 2 * n > kMaxPanels)
            return estimate;
        previous = estimate;
        std::vector<double> refined(2 * n + 1);
        for (int i = 0; i <= n; ++i)
            refined[2 * i] = logs[i];
        for (int i = 0; i < n; ++i)
            refined[2 * i + 1] = log_region(runs, a + (b - a) * (2 * i + 1) / (2.0 * n));
        logs = std::move(refined);
        n *= 2;
    }
}

double log_add(double x, double y) {
    if (x < y)
        std::swap(x, y);
    if (y == -std::numeric_limits<double>::infinity())
        return x;
    return x + std::log1p(std::exp(y - x));
}

void check_quad(int quad_points) {
    if (quad_points < 16)
        throw DomainError("quad_points must be >= 16");
}

}  // namespace

double log_region_volume(const GeodesicParams& params, double tau) {
    if (!(tau > 0.0))
        throw DomainError("region volume needs tau > 0");
    return log_region(collapse(params), tau);
}

double averaged_log_volume(const GeodesicParams& params, double tau, int quad_points) {
    check_quad(quad_points);
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw DomainError("averaged volume needs finite tau > 0");
    return log_integral(collapse(params), 0.0, tau, quad_points) - std::log(tau);
}

VolumeSeries ig_entropy_series(const GeodesicParams& params, std::span<const double> tau_grid,
                               int quad_points) {
    check_quad(quad_points);
    const auto runs = collapse(params);
    VolumeSeries out;
    // the running integral is extended segment by segment between grid points
    double previous_tau = 0.0;
    double log_total = -std::numeric_limits<double>::infinity();
    for (double tau : tau_grid) {
        if (!(tau > 0.0) || !std::isfinite(tau))
            throw DomainError("entropy series needs finite tau > 0");
        if (!(tau > previous_tau))
            throw DomainError("entropy series needs a strictly increasing tau grid");
        const int panels = previous_tau == 0.0 ? quad_points : 16;
        log_total = log_add(log_total, log_integral(runs, previous_tau, tau, panels));
        previous_tau = tau;
        out.tau_grid.push_back(tau);
        out.log_region_volume.push_back(log_region(runs, tau));
        out.log_avg_volume.push_back(log_total - std::log(tau));
    }
    out.entropy = out.log_avg_volume;
    return out;
}

}  // namespace igchaos::entropy
