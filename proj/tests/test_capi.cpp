#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "igchaos/igchaos.h"

namespace {

struct Config {
    igc_config* p = nullptr;
    ~Config() { igc_config_destroy(p); }
};

struct Result {
    igc_result* p = nullptr;
    ~Result() { igc_result_destroy(p); }
    std::string text() const { return igc_result_text(p); }
    std::string aux() const { return igc_result_aux(p); }
};

}  // namespace

TEST_CASE("version and status names") {
    CHECK(std::strlen(igc_version()) > 0);
    CHECK(std::string(igc_status_name(IGC_OK)) == "ok");
    CHECK(std::string(igc_status_name(IGC_ERR_VERIFICATION)) == "verification failure");
    CHECK(std::string(igc_status_name(static_cast<igc_status>(99))) == "unknown status");
}

TEST_CASE("null arguments") {
    CHECK(igc_config_create(nullptr) == IGC_ERR_NULL_ARG);
    CHECK(std::strlen(igc_last_error()) > 0);
    igc_config* c = nullptr;
    CHECK(igc_config_from_json(nullptr, &c) == IGC_ERR_NULL_ARG);
    CHECK(igc_config_set(nullptr, "N", "1") == IGC_ERR_NULL_ARG);
    double v = 0.0;
    CHECK(igc_ricci_scalar(nullptr, 3, &v) == IGC_ERR_NULL_ARG);
    CHECK(igc_run(nullptr, nullptr, nullptr) == IGC_ERR_NULL_ARG);
    CHECK(igc_verify(nullptr, nullptr) == IGC_ERR_NULL_ARG);
    igc_config_destroy(nullptr);
    igc_result_destroy(nullptr);
    CHECK(std::string(igc_result_text(nullptr)).empty());
}

TEST_CASE("config lifecycle") {
    Config c;
    REQUIRE(igc_config_create(&c.p) == IGC_OK);
    CHECK(std::string(igc_last_error()).empty());
    CHECK(igc_config_set(c.p, "N", "4") == IGC_OK);
    CHECK(igc_config_set(c.p, "fit_window", "[20, 40]") == IGC_OK);
    CHECK(igc_config_set(c.p, "N", "0") == IGC_ERR_VALIDATION);
    CHECK(igc_config_set(c.p, "N", "not json") == IGC_ERR_VALIDATION);
    CHECK(igc_config_set(c.p, "bogus", "1") == IGC_ERR_VALIDATION);
    CHECK(std::string(igc_last_error()).find("bogus") != std::string::npos);
    Result r;
    REQUIRE(igc_config_to_json(c.p, &r.p) == IGC_OK);
    // rejected values left the configuration alone
    CHECK(r.text().find("\"N\": 4") != std::string::npos);

    Config d;
    CHECK(igc_config_from_json("{\"N\": 2, \"lambda\": 0.5}", &d.p) == IGC_OK);
    Config e;
    CHECK(igc_config_from_json("{\"N\": 2,", &e.p) == IGC_ERR_VALIDATION);
    CHECK(e.p == nullptr);
    CHECK(igc_config_load("/nonexistent.json", &e.p) == IGC_ERR_IO);
}

TEST_CASE("point geometry") {
    const double pt[] = {0.0, 1.0, 2.0, 2.0, -1.0, 0.5};
    double R = 0.0;
    REQUIRE(igc_ricci_scalar(pt, 3, &R) == IGC_OK);
    CHECK(R == -3.0);
    double g[6];
    REQUIRE(igc_metric(pt, 3, g) == IGC_OK);
    CHECK(g[0] == 1.0);
    CHECK(g[1] == 2.0);
    CHECK(g[2] == 0.25);
    CHECK(g[3] == 0.5);
    double gam[9];
    REQUIRE(igc_christoffel(pt, 3, gam) == IGC_OK);
    CHECK(gam[3] == -0.5);
    CHECK(gam[4] == 0.25);
    CHECK(gam[5] == -0.5);
    double K = 0.0;
    REQUIRE(igc_sectional_curvature(pt, 3, 2, 3, &K) == IGC_OK);
    CHECK(K == doctest::Approx(-0.5));
    REQUIRE(igc_sectional_curvature(pt, 3, 0, 2, &K) == IGC_OK);
    CHECK(K == 0.0);
    CHECK(igc_sectional_curvature(pt, 3, 1, 1, &K) == IGC_ERR_VALIDATION);
    const double bad[] = {0.0, -1.0, 0.0, 1.0, 0.0, 1.0};
    CHECK(igc_ricci_scalar(bad, 3, &R) == IGC_ERR_VALIDATION);
    CHECK(igc_ricci_scalar(pt, 2, &R) == IGC_ERR_VALIDATION);
}

TEST_CASE("analytic geodesic") {
    Config c;
    REQUIRE(igc_config_create(&c.p) == IGC_OK);
    std::vector<double> out(12);
    REQUIRE(igc_analytic_geodesic(c.p, 1.0, out.data(), out.size()) == IGC_OK);
    CHECK(out[0] == doctest::Approx(2.0 * (1.0 + std::tanh(1.0))));
    CHECK(out[1] == doctest::Approx(std::sqrt(2.0) / std::cosh(1.0)));
    CHECK(igc_analytic_geodesic(c.p, 1.0, out.data(), 4) == IGC_ERR_VALIDATION);
}

TEST_CASE("tables") {
    Config c;
    REQUIRE(igc_config_create(&c.p) == IGC_OK);
    REQUIRE(igc_config_set(c.p, "tau_samples", "81") == IGC_OK);
    Result cur, geo, jac, ent, max;
    REQUIRE(igc_curvature_csv(c.p, &cur.p) == IGC_OK);
    CHECK(cur.text().rfind("quantity,index_a,index_b,closed_form,oracle,abs_error\n", 0) == 0);
    REQUIRE(igc_geodesic_csv(c.p, &geo.p) == IGC_OK);
    CHECK(geo.text().rfind("tau,block,mu,sigma,dmu,dsigma,speed_sq\n", 0) == 0);
    REQUIRE(igc_jacobi_csv(c.p, &jac.p) == IGC_OK);
    CHECK(jac.text().rfind("tau,intensity,running_rate\n", 0) == 0);
    REQUIRE(igc_entropy_csv(c.p, &ent.p) == IGC_OK);
    CHECK(ent.text().rfind("tau,log_region_volume,log_avg_volume,entropy\n", 0) == 0);
    CHECK(ent.aux().find("\"slope\"") != std::string::npos);
    REQUIRE(igc_maxent_csv(c.p, &max.p) == IGC_OK);
    CHECK(max.aux().find("\"alpha\"") != std::string::npos);
}

TEST_CASE("run, sweep and verify") {
    const auto dir = std::filesystem::temp_directory_path() / "igchaos_test_capi";
    std::filesystem::remove_all(dir);
    Config c;
    REQUIRE(igc_config_create(&c.p) == IGC_OK);
    Result run;
    REQUIRE(igc_run(c.p, dir.string().c_str(), &run.p) == IGC_OK);
    CHECK(run.text().find("\"ricci_scalar\": -3.0") != std::string::npos);
    CHECK(std::filesystem::exists(dir / "record.json"));

    Result r2;
    CHECK(igc_sweep(c.p, nullptr, &r2.p) == IGC_ERR_VALIDATION);
    REQUIRE(igc_config_set(c.p, "sweep_N", "[1, 2]") == IGC_OK);
    REQUIRE(igc_config_set(c.p, "sweep_lambda", "[1]") == IGC_OK);
    Result sw;
    REQUIRE(igc_sweep(c.p, nullptr, &sw.p) == IGC_OK);
    CHECK(sw.text().find("\n1,1,-3,") != std::string::npos);
    CHECK(sw.text().find("\n2,1,-6,") != std::string::npos);

    Result v;
    CHECK(igc_verify(nullptr, &v.p) == IGC_OK);
    CHECK(v.aux().find("\"all_passed\": true") != std::string::npos);
    Result bad;
    CHECK(igc_verify("{\"perturb_christoffel_sign\": true}", &bad.p) == IGC_ERR_VERIFICATION);
    CHECK(bad.text().find("[FAIL] christoffel_vs_finite_difference") != std::string::npos);
    CHECK(std::string(igc_last_error()).find("gaussian-manifold/christoffel_at") != std::string::npos);
    Result opt;
    CHECK(igc_verify("{\"colour\": 1}", &opt.p) == IGC_ERR_VALIDATION);
}

TEST_CASE("last error is per thread") {
    CHECK(igc_config_create(nullptr) == IGC_ERR_NULL_ARG);
    std::string other = "unset";
    std::thread([&] { other = igc_last_error(); }).join();
    CHECK(other.empty());
    CHECK(std::strlen(igc_last_error()) > 0);
}
