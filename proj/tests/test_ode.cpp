#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "core/ode.hpp"

using namespace igchaos::ode;

namespace {

void oscillator(double, std::span<const double> y, std::span<double> f) {
    f[0] = y[1];
    f[1] = -y[0];
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = a + (b - a) * i / (n - 1);
    return v;
}

}  // namespace

TEST_CASE("harmonic oscillator at tight tolerance") {
    const std::vector<double> y0{1.0, 0.0};
    const auto t = linspace(0.0, 20.0 * std::numbers::pi, 201);
    const auto tr = integrate(oscillator, y0, t, {1e-12, 1e-300});
    REQUIRE(tr.status == Status::Ok);
    REQUIRE(tr.states.size() == t.size());
    double err = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
        err = std::max({err, std::abs(tr.states[i][0] - std::cos(t[i])), std::abs(tr.states[i][1] + std::sin(t[i]))});
    CHECK(err < 1e-9);
    CHECK(tr.stats.accepted > 0);
    CHECK(tr.stats.max_error_estimate <= 1.0);
}

TEST_CASE("global error tracks the tolerance") {
    // an eighth-order method: tolerance down 1e3 moves the error by a similar factor
    auto run = [](double rel) {
        const std::vector<double> y0{1.0};
        const std::vector<double> t{0.0, 5.0};
        const auto tr = integrate([](double, std::span<const double> y, std::span<double> f) { f[0] = -y[0] * std::cos(y[0]); },
                                  y0, t, {rel, 1e-300});
        return tr;
    };
    // reference from a much tighter run
    const double ref = run(1e-14).states.back()[0];
    const auto loose = run(1e-6);
    const auto tight = run(1e-9);
    const double e_loose = std::abs(loose.states.back()[0] - ref);
    const double e_tight = std::abs(tight.states.back()[0] - ref);
    CHECK(e_loose < 1e-5 * std::abs(ref));
    CHECK(e_tight < 1e-8 * std::abs(ref));
    CHECK(tight.stats.accepted > loose.stats.accepted);
    CHECK(tight.stats.evaluations > 0);
}

TEST_CASE("dense output between steps") {
    Dop853 solver(oscillator, 2, {1e-12, 1e-300});
    const std::vector<double> y0{0.0, 1.0};
    solver.init(0.0, y0);
    std::vector<double> out(2);
    double worst = 0.0;
    while (solver.time() < 10.0) {
        REQUIRE(solver.step(10.0) == Status::Ok);
        const double a = solver.previous_time(), b = solver.time();
        for (int j = 0; j <= 8; ++j) {
            const double t = a + (b - a) * j / 8.0;
            solver.dense(t, out);
            worst = std::max({worst, std::abs(out[0] - std::sin(t)), std::abs(out[1] - std::cos(t))});
        }
    }
    CHECK(solver.time() == 10.0);
    CHECK(worst < 1e-9);
}

TEST_CASE("finite-time blow-up is reported") {
    const std::vector<double> y0{1.0};
    const std::vector<double> t{0.0, 2.0};
    const auto tr = integrate([](double, std::span<const double> y, std::span<double> f) { f[0] = y[0] * y[0]; }, y0, t,
                              {1e-10, 1e-300});
    CHECK(tr.status != Status::Ok);
    CHECK(tr.states.size() == 1);
    CHECK_FALSE(tr.message.empty());
}

TEST_CASE("guard halts integration") {
    const std::vector<double> y0{1.0, 0.0};
    const auto t = linspace(0.0, 10.0, 11);
    const auto tr = integrate(oscillator, y0, t, {1e-10, 1e-300},
                              [](double, std::span<const double> y) { return y[0] < 0.0 ? std::string("crossed") : std::string(); });
    CHECK(tr.status == Status::Halted);
    CHECK(tr.message.find("crossed") != std::string::npos);
    CHECK(tr.states.size() >= 2);
    CHECK(tr.states.size() < t.size());
}

TEST_CASE("tiny initial derivative does not stall the first step") {
    // a derivative near 1e-16 at t = 0 must not shrink the initial step to nothing
    const std::vector<double> y0{1.0, -1e-16};
    const auto t = linspace(0.0, 1.0, 3);
    const auto tr = integrate(oscillator, y0, t, {1e-10, 1e-300});
    CHECK(tr.status == Status::Ok);
}

TEST_CASE("status names") {
    CHECK(std::string(status_name(Status::Ok)) != std::string(status_name(Status::StepUnderflow)));
    CHECK(std::string(status_name(Status::NonFinite)).size() > 0);
}
