#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "core/entropy.hpp"
#include "core/errors.hpp"
#include "core/oracle.hpp"

using namespace igchaos;
using namespace igchaos::oracle;

TEST_CASE("gauss-hermite rule") {
    const auto r = gauss_hermite_rule(40);
    REQUIRE(r.nodes.size() == 40);
    double w = 0.0, m2 = 0.0, m4 = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        w += r.weights[i];
        m2 += r.weights[i] * r.nodes[i] * r.nodes[i];
        m4 += r.weights[i] * std::pow(r.nodes[i], 4);
    }
    const double sp = std::sqrt(std::numbers::pi);
    CHECK(w == doctest::Approx(sp).epsilon(1e-14));
    CHECK(m2 == doctest::Approx(sp / 2.0).epsilon(1e-14));
    CHECK(m4 == doctest::Approx(3.0 * sp / 4.0).epsilon(1e-13));
    CHECK_THROWS_AS(gauss_hermite_rule(1), DomainError);
}

TEST_CASE("fisher metric by gauss-hermite") {
    auto q = fisher_metric_quadrature(ThetaPoint::uniform(1, {0.0, 1.0}), {});
    CHECK(std::abs(q.blocks[0].g_mumu - 1.0) < 1e-10);
    CHECK(std::abs(q.blocks[0].g_sigmasigma - 2.0) < 1e-10);
    CHECK(q.max_in_block_offdiag < 1e-10);
    CHECK(q.max_cross_block < 1e-10);
    q = fisher_metric_quadrature(ThetaPoint::uniform(1, {5.0, 0.5}), {});
    CHECK(std::abs(q.blocks[1].g_mumu - 4.0) < 1e-10);
    CHECK(std::abs(q.blocks[1].g_sigmasigma - 8.0) < 1e-10);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> mu(-10, 10), ls(std::log(0.1), std::log(10.0));
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double s = std::exp(ls(rng));
        const auto r = fisher_metric_quadrature(ThetaPoint::uniform(1, {mu(rng), s}), {});
        // scale-free comparison: sigma^2 g should be (1, 2)
        worst = std::max({worst, std::abs(r.blocks[0].g_mumu * s * s - 1.0),
                          std::abs(r.blocks[0].g_sigmasigma * s * s - 2.0)});
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("fisher metric by monte carlo") {
    QuadratureSpec spec;
    spec.method = QuadratureMethod::MonteCarlo;
    const auto q = fisher_metric_quadrature(ThetaPoint::uniform(1, {0.0, 1.0}), spec);
    CHECK(q.converged);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(std::abs(q.blocks[k].g_mumu - 1.0) <= 3.0 * q.standard_errors[k].g_mumu);
        CHECK(std::abs(q.blocks[k].g_sigmasigma - 2.0) <= 3.0 * q.standard_errors[k].g_sigmasigma);
    }
    // too few samples is reported, not silently accepted
    spec.sample_count = 10;
    const auto bad = fisher_metric_quadrature(ThetaPoint::uniform(1, {0.0, 1.0}), spec);
    CHECK_FALSE(bad.converged);
    CHECK_FALSE(bad.diagnostic.empty());

    spec.sample_count = 0;
    CHECK_THROWS_AS(fisher_metric_quadrature(ThetaPoint::uniform(1, {0.0, 1.0}), spec), DomainError);
}

TEST_CASE("finite-difference connection") {
    auto fd = fd_christoffel(ThetaPoint::uniform(1, {0.0, 2.0}), 1e-5);
    CHECK(fd[0].mu_musigma == doctest::Approx(-0.5).epsilon(1e-7));
    CHECK(fd[0].sigma_mumu == doctest::Approx(0.25).epsilon(1e-7));
    CHECK(fd[0].sigma_sigmasigma == doctest::Approx(-0.5).epsilon(1e-7));
    fd = fd_christoffel(ThetaPoint::uniform(1, {0.0, 1.0}), 1e-5);
    CHECK(std::abs(fd[0].mu_musigma + 1.0) < 1e-7);
    CHECK(std::abs(fd[0].sigma_mumu - 0.5) < 1e-7);
    CHECK(std::abs(fd[0].sigma_sigmasigma + 1.0) < 1e-7);
    const auto shifted = fd_christoffel(ThetaPoint::uniform(1, {3.0, 1.0}), 1e-5);
    CHECK(std::abs(shifted[0].sigma_mumu - fd[0].sigma_mumu) < 1e-12);
    CHECK_THROWS_AS(fd_christoffel(ThetaPoint::uniform(1, {0.0, 1.0}), 0.2), DomainError);
    CHECK_THROWS_AS(fd_christoffel(ThetaPoint::uniform(1, {0.0, 1.0}), 0.0), DomainError);

    // components that the closed form declares zero
    const auto full = fd_block_connection(ThetaPoint::uniform(1, {0.0, 1.5}), 1e-5);
    CHECK(std::abs(full[0].gamma[0][0][0]) < 1e-9);
    CHECK(std::abs(full[0].gamma[0][1][1]) < 1e-9);
    CHECK(std::abs(full[0].gamma[1][0][1]) < 1e-9);
    CHECK(full[0].gamma[0][0][1] == doctest::Approx(full[0].gamma[0][1][0]));
}

TEST_CASE("finite-difference ricci scalar") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ls(std::log(0.1), std::log(10.0));
    for (int N : {1, 3}) {
        std::vector<Block> b(3 * N);
        for (auto& x : b)
            x = {1.0, std::exp(ls(rng))};
        const ThetaPoint p(b);
        const double R = fd_ricci_scalar(p, 1e-4 * p.min_sigma());
        CHECK(std::abs(R + 3.0 * N) / (3.0 * N) < 1e-4);
    }
    // second order: halving the step cuts the error by about four
    const auto p = ThetaPoint::uniform(1, {0.0, 1.0});
    const double e1 = std::abs(fd_ricci_scalar(p, 4e-3) + 3.0);
    const double e2 = std::abs(fd_ricci_scalar(p, 2e-3) + 3.0);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("dense brute-force riemann tensor") {
    const ThetaPoint p({{0.3, 0.8}, {1.0, 1.3}, {-2.0, 0.6}, {0.0, 1.0}, {5.0, 1.9}, {1.0, 0.7}});
    const double h = 1e-4 * p.min_sigma();
    const auto R = fd_riemann_dense(p, h);
    REQUIRE(R.dimension() == 12);
    const auto d = riemann_symmetry_defects(R);
    CHECK(d.antisym_first_pair < 1e-6);
    CHECK(d.antisym_second_pair < 1e-6);
    CHECK(d.first_bianchi < 1e-6);
    for (std::size_t a = 0; a < 12; ++a)
        for (std::size_t b = 0; b < 12; ++b)
            for (std::size_t c = 0; c < 12; ++c)
                for (std::size_t e = 0; e < 12; ++e) {
                    const double exact = riemann_component(p, a, b, c, e);
                    REQUIRE(std::abs(R(a, b, c, e) - exact) <= 1e-5 * (1.0 + std::abs(exact)));
                }
    CHECK(fd_sectional_dense(p, {0, 1}, h) == doctest::Approx(-0.5).epsilon(1e-5));
    CHECK(std::abs(fd_sectional_dense(p, {0, 2}, h)) < 1e-5);
    CHECK(std::abs(fd_sectional_dense(p, {1, 9}, h)) < 1e-5);
    CHECK_THROWS_AS(fd_riemann_dense(ThetaPoint::uniform(3, {0.0, 1.0}), 1e-4), DomainError);

    const auto dense_gamma = fd_christoffel_dense(p, h);
    const auto closed = christoffel_at(p);
    for (std::size_t a = 0; a < 12; ++a)
        for (std::size_t b = 0; b < 12; ++b)
            for (std::size_t c = 0; c < 12; ++c)
                REQUIRE(std::abs(dense_gamma[(a * 12 + b) * 12 + c] - christoffel_component(closed, a, b, c)) < 1e-6);
}

TEST_CASE("adaptive simpson") {
    CHECK(adaptive_simpson([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-12) ==
          doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
    CHECK(adaptive_simpson([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-12) ==
          doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("region volume quadrature agrees with the closed form") {
    for (int N : {1, 2})
        for (double lam : {0.5, 1.0, 2.0})
            for (double tau : {0.5, 1.0, 5.0, 20.0}) {
                GeodesicParams p;
                p.lambda_rate = lam;
                p.n = N;
                // the oracle's own error compounds over 3N blocks, so tighten it for N = 2
                const double tol = N == 1 ? 1e-10 : 1e-12;
                const double a = entropy::log_region_volume(p, tau / lam);
                const double b = region_volume_quadrature(p, tau / lam, tol);
                CHECK(std::abs(std::expm1(a - b)) < 1e-9);
            }
}
