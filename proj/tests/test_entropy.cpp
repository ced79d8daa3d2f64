#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "core/entropy.hpp"
#include "core/errors.hpp"
#include "core/fit.hpp"

using namespace igchaos;
using namespace igchaos::entropy;

namespace {

GeodesicParams params(int N, double lam, double Lambda = std::sqrt(8.0)) {
    GeodesicParams p;
    p.n = N;
    p.lambda_rate = lam;
    p.Lambda = Lambda;
    return p;
}

// per-block region factor straight from the closed-form trajectory, in long double
long double block_factor(long double B, long double beta, long double t) {
    auto q = [&](long double s) { return std::exp(-beta * s) + B * B / (8 * beta * beta) * std::exp(beta * s); };
    auto mu = [&](long double s) { return B * B / (2 * beta) * std::exp(beta * s) / q(s); };
    auto inv_sigma = [&](long double s) { return q(s) / B; };
    return std::fabs(mu(t) - mu(0)) * std::sqrt(2.0L) * std::fabs(inv_sigma(t) - inv_sigma(0));
}

// log of (1/tau) * integral of factor^(3N) by composite Simpson in long double
double reference_log_avg(int N, double lam, double Lambda, double tau, int panels = 20000) {
    long double sum = 0;
    const long double h = static_cast<long double>(tau) / panels;
    for (int i = 0; i <= panels; ++i) {
        const long double w = (i == 0 || i == panels) ? 1 : (i % 2 ? 4 : 2);
        sum += w * std::pow(block_factor(Lambda, lam, h * i), 3 * N);
    }
    return static_cast<double>(std::log(sum * h / 3 / tau));
}

std::vector<double> grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = lo + (hi - lo) * i / (n - 1);
    return g;
}

}  // namespace

TEST_CASE("volume element") {
    CHECK(volume_element(ThetaPoint::uniform(1, {0.0, 1.0})) == doctest::Approx(std::pow(std::sqrt(2.0), 3)).epsilon(1e-15));
    const double a = volume_element(ThetaPoint({{0, 1}, {0, 1}, {0, 1}}));
    const double b = volume_element(ThetaPoint({{0, 2}, {0, 1}, {0, 1}}));
    CHECK(b / a == doctest::Approx(0.25).epsilon(1e-15));
    const ThetaPoint p({{1, 0.3}, {2, 1.7}, {0, 4.0}});
    double det = 1.0;
    for (const auto& m : metric_at(p))
        det *= m.g_mumu * m.g_sigmasigma;
    CHECK(volume_element(p) == doctest::Approx(std::sqrt(det)).epsilon(1e-14));
    CHECK(log_volume_element(p) == doctest::Approx(std::log(std::sqrt(det))).epsilon(1e-14));
    // no overflow far beyond double range of the product
    const auto tiny = ThetaPoint::uniform(100, {0.0, 1e-3});
    CHECK(log_volume_element(tiny) == doctest::Approx(300 * (0.5 * std::log(2.0) - 2.0 * std::log(1e-3))).epsilon(1e-13));
}

TEST_CASE("region volume closed form") {
    const auto c = params(1, 1.0).block_constants()[0];
    const double expected = std::sqrt(2.0) * 2.0 * std::tanh(1.0) * (std::cosh(1.0) / std::sqrt(2.0) - 1.0 / std::sqrt(2.0));
    CHECK(std::exp(block_log_region_factor(c, 1.0)) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(std::exp(block_log_region_factor(c, 1.0)) == doctest::Approx(0.8272).epsilon(1e-4));
    for (double lam : {0.5, 2.0})
        for (double t : {1e-6, 0.01, 1.0, 30.0})
            CHECK(block_log_region_factor(params(1, lam, 1.3).block_constants()[0], t) ==
                  doctest::Approx(static_cast<double>(std::log(block_factor(1.3L, lam, t)))).epsilon(1e-12));
    // additivity over blocks
    for (int N : {1, 2, 7})
        CHECK(log_region_volume(params(N, 1.0), 3.0) == doctest::Approx(3.0 * N * block_log_region_factor(c, 3.0)).epsilon(1e-14));
    // growth rate of log volume
    const auto p = params(2, 0.5);
    CHECK(log_region_volume(p, 80.0) / 80.0 == doctest::Approx(3.0).epsilon(0.05));
    CHECK_THROWS_AS(log_region_volume(p, 0.0), DomainError);
    CHECK_THROWS_AS(log_region_volume(p, -1.0), DomainError);
}

TEST_CASE("averaged volume against an independent quadrature") {
    for (int N : {1, 2, 10})
        for (double tau : {0.5, 5.0, 40.0}) {
            const double ref = reference_log_avg(N, 1.0, std::sqrt(8.0), tau);
            CHECK(averaged_log_volume(params(N, 1.0), tau) == doctest::Approx(ref).epsilon(1e-9));
        }
    CHECK(averaged_log_volume(params(1, 0.5, 1.0), 7.0) ==
          doctest::Approx(reference_log_avg(1, 0.5, 1.0, 7.0)).epsilon(1e-9));
    CHECK_THROWS_AS(averaged_log_volume(params(1, 1.0), 1.0, 8), DomainError);
    CHECK_THROWS_AS(averaged_log_volume(params(1, 1.0), 0.0), DomainError);
}

TEST_CASE("averaged volume asymptotics and bounds") {
    // log V = 3 N lambda tau - ln(3 N lambda tau) + O(e^{-lambda tau}) for Lambda = sqrt 8, so the
    // ratio at N = 1, tau = 40 sits 4% below 3; the slope, not the ratio, carries the 3 N lambda law
    const double r1 = averaged_log_volume(params(1, 1.0), 40.0) / 40.0;
    CHECK(r1 == doctest::Approx(3.0 - std::log(120.0) / 40.0).epsilon(1e-6));
    MESSAGE("N = 1, tau = 40: (log V)/tau = " << r1 << ", " << 100.0 * (1.0 - r1 / 3.0) << "% below 3");
    const double big = averaged_log_volume(params(10, 1.0), 40.0);
    CHECK(std::isfinite(big));
    CHECK(big / 40.0 == doctest::Approx(30.0).epsilon(0.02));
    // mean-value bounds in log space; the region volume is increasing from 0 here
    for (double tau : {0.5, 3.0, 20.0}) {
        const auto p = params(2, 1.0);
        const double avg = averaged_log_volume(p, tau);
        CHECK(avg <= log_region_volume(p, tau));
        CHECK(avg >= log_region_volume(p, tau * 1e-6));
    }
}

TEST_CASE("entropy series") {
    const auto g = grid(0.1, 40.0, 400);
    const auto s = ig_entropy_series(params(1, 1.0), g);
    REQUIRE(s.entropy.size() == g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(s.entropy[i] == s.log_avg_volume[i]);
        CHECK(std::isfinite(s.log_region_volume[i]));
    }
    // cumulative segments agree with direct evaluation at every point
    for (std::size_t i : {0u, 9u, 150u, 399u})
        CHECK(s.log_avg_volume[i] == doctest::Approx(averaged_log_volume(params(1, 1.0), g[i])).epsilon(1e-9));
    const auto fit = slope_fit(s.tau_grid, s.entropy, {20.0, 40.0});
    CHECK(fit.slope >= 2.94);
    CHECK(fit.slope <= 3.06);
    for (std::size_t i = 1; i < g.size(); ++i)
        if (g[i] >= 20.0)
            CHECK(s.entropy[i] > s.entropy[i - 1]);
    CHECK_THROWS_AS(ig_entropy_series(params(1, 1.0), std::vector<double>{0.0, 1.0}), DomainError);
    CHECK_THROWS_AS(ig_entropy_series(params(1, 1.0), std::vector<double>{1.0, 1.0}), DomainError);
}

TEST_CASE("entropy slope over the (N, lambda) grid") {
    for (int N : {1, 2, 5, 10})
        for (double lam : {0.5, 1.0, 2.0}) {
            const auto s = ig_entropy_series(params(N, lam), grid(0.1 / lam, 40.0 / lam, 400));
            const auto fit = slope_fit(s.tau_grid, s.entropy, {20.0 / lam, 40.0 / lam});
            CAPTURE(N);
            CAPTURE(lam);
            CHECK(fit.slope / (3.0 * N * lam) == doctest::Approx(1.0).epsilon(0.02));
        }
    const auto s = ig_entropy_series(params(2, 0.5), grid(0.2, 80.0, 400));
    CHECK(slope_fit(s.tau_grid, s.entropy, {40.0, 80.0}).slope == doctest::Approx(3.0).epsilon(0.02));
}

TEST_CASE("entropy per microvariable triple is nearly N-independent") {
    // S/N carries a -ln(3 N lambda tau)/N correction, so compare with the cross-N mean
    for (double lam : {0.5, 1.0, 2.0}) {
        const double tau = 40.0 / lam;
        std::vector<double> per;
        for (int N : {1, 2, 5, 10})
            per.push_back(averaged_log_volume(params(N, lam), tau) / N);
        const double mean = std::accumulate(per.begin(), per.end(), 0.0) / per.size();
        for (double v : per)
            CHECK(std::abs(v / mean - 1.0) <= 0.03);
        MESSAGE("lambda " << lam << ": S/N spread (max/min - 1) = " << (*std::max_element(per.begin(), per.end()) /
                                                                           *std::min_element(per.begin(), per.end()) - 1.0));
    }
}

TEST_CASE("slope fit") {
    const std::vector<double> t{0, 1, 2, 3, 4};
    std::vector<double> y1, y2;
    for (double x : t) {
        y1.push_back(3 * x + 1);
        y2.push_back(-2 * x);
    }
    auto f = slope_fit(t, y1, {0, 4});
    CHECK(f.slope == doctest::Approx(3.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.r_squared == doctest::Approx(1.0));
    CHECK(f.points == 5);
    f = slope_fit(t, y2, {0, 4});
    CHECK(f.slope == doctest::Approx(-2.0));
    CHECK(std::abs(f.intercept) < 1e-14);
    CHECK(f.r_squared == doctest::Approx(1.0));
    CHECK_THROWS_AS(slope_fit(t, y1, {0.5, 2.5}), DomainError);
    CHECK_THROWS_AS(slope_fit(t, y1, {2, 2}), DomainError);
    CHECK_THROWS_AS(slope_fit(t, std::vector<double>{1, 2}, {0, 4}), DomainError);
}
