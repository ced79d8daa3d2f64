#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"
#include "runner/config.hpp"
#include "runner/experiment.hpp"
#include "runner/output.hpp"
#include "runner/verify.hpp"

using namespace igchaos;
using namespace igchaos::runner;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("igchaos_test_runner_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("config defaults and derived values") {
    const ExperimentConfig c;
    CHECK_NOTHROW(validate(c));
    const auto r = resolve(c);
    CHECK(r.tau_max == 40.0);
    CHECK(r.fit_window.lo == 20.0);
    CHECK(r.fit_window.hi == 40.0);
    CHECK(r.lyapunov_window.lo == 10.0);
    CHECK(r.lyapunov_window.hi == 20.0);
    CHECK(r.jlc_check_window.hi == 10.0);
    CHECK(r.delta_lambda == doctest::Approx(1e-5));
    const auto g = r.tau_grid();
    CHECK(g.size() == 401);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 40.0);

    const auto r2 = resolve_for(c, 5, 2.0);
    CHECK(r2.N == 5);
    CHECK(r2.tau_max == 20.0);
    CHECK(r2.fit_window.lo == 10.0);
    CHECK(r2.delta_lambda == doctest::Approx(2e-5));
}

TEST_CASE("config from json and merge") {
    auto c = config_from_json(json::parse(R"({"N": 3, "lambda": 0.5, "fit_window": [30, 60], "maxent": {"mean": 2}})"));
    CHECK(c.N == 3);
    CHECK(c.lambda_rate == 0.5);
    REQUIRE(c.fit_window.has_value());
    CHECK(c.fit_window->lo == 30.0);
    CHECK(c.maxent.mean == 2.0);
    CHECK(c.maxent.stddev == 1.0);
    merge_config(c, json::parse(R"({"N": 2})"));
    CHECK(c.N == 2);
    CHECK(c.lambda_rate == 0.5);

    // round trip
    const auto back = config_from_json(to_json(c));
    CHECK(to_json(back) == to_json(c));

    CHECK_THROWS_AS(config_from_json(json::parse(R"({"lamda": 1})")), DomainError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"N": "two"})")), DomainError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"N": 0})")), DomainError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"lambda": -1})")), DomainError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"tau_samples": 1})")), DomainError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"fit_window": [30, 50]})")), DomainError);  // beyond tau_max
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"maxent": {"nodez": 3}})")), DomainError);
    CHECK_THROWS_AS(config_from_json(json::parse(R"([1, 2])")), DomainError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), IoError);
    // closed form out of range
    ExperimentConfig big;
    big.tau_max = 800.0;
    CHECK_THROWS_AS(resolve(big), DomainError);
}

TEST_CASE("format and csv") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-3.0) == "-3");
    CHECK(format_double(1e-300) == "1e-300");
    CHECK(format_double(NAN) == "nan");
    CHECK(format_double(INFINITY) == "inf");
    CHECK(format_double(-INFINITY) == "-inf");
    const double x = 0.1 + 0.2;
    CHECK(std::stod(format_double(x)) == x);
    CsvTable t{{"a", "b"}, {}};
    t.add({"1", "2"});
    CHECK(t.str() == "a,b\n1,2\n");
    CHECK_THROWS_AS(t.add({"1"}), DomainError);
}

TEST_CASE("svg chart") {
    const auto svg = svg_line_chart("t", "x", "y", {{"s", {0, 1, 2, 3}, {0, 1, NAN, 9}}});
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("width=\"800\"") != std::string::npos);
    CHECK(svg.find("height=\"600\"") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("nan") == std::string::npos);
}

TEST_CASE("run record for the default configuration") {
    const auto dir = scratch("default");
    const auto rec = run_experiment(ExperimentConfig{}, dir);
    REQUIRE(rec.ok);
    CHECK(rec.ricci_scalar == -3.0);
    CHECK(rec.entropy_slope == doctest::Approx(3.0).epsilon(0.02));
    CHECK(rec.lyapunov == doctest::Approx(1.0).epsilon(0.02));
    for (const auto* f : {"config.json", "curvature.csv", "geodesic.csv", "entropy.csv", "jacobi.csv", "record.json", "timing.json"})
        CHECK(fs::exists(dir / f));
    CHECK_FALSE(fs::exists(dir / "entropy.svg"));
    const auto j = json::parse(slurp(dir / "record.json"));
    CHECK(j["schema_version"] == 1);
    CHECK(j["config"]["tau_max"] == 40.0);
    CHECK_FALSE(j.contains("wall_seconds"));
    CHECK(json::parse(slurp(dir / "timing.json"))["wall_seconds"].get<double>() >= 0.0);
    CHECK(j["details"]["jacobi"]["oracle_max_rel_check_window"].get<double>() < 5e-3);

    // curvature table: every oracle error small
    const auto rows = read_csv(dir / "curvature.csv");
    REQUIRE(rows.size() > 1);
    for (std::size_t i = 1; i < rows.size(); ++i)
        CHECK(std::stod(rows[i][5]) < 1e-4);
}

TEST_CASE("run record for N = 5, lambda = 2") {
    ExperimentConfig c;
    c.N = 5;
    c.lambda_rate = 2.0;
    const auto rec = run_experiment(c, {});
    REQUIRE(rec.ok);
    CHECK(rec.ricci_scalar == -15.0);
    CHECK(rec.entropy_slope == doctest::Approx(30.0).epsilon(0.02));
    CHECK(rec.lyapunov == doctest::Approx(2.0).epsilon(0.02));
    CHECK(rec.artifacts.empty());
}

TEST_CASE("determinism and svg neutrality") {
    const auto a = scratch("det_a"), b = scratch("det_b"), s = scratch("det_svg");
    ExperimentConfig c;
    c.N = 2;
    run_experiment(c, a);
    run_experiment(c, b);
    c.emit_svg = true;
    run_experiment(c, s);
    CHECK(fs::exists(s / "entropy.svg"));
    CHECK(fs::exists(s / "jacobi.svg"));
    for (const auto* f : {"config.json", "curvature.csv", "geodesic.csv", "entropy.csv", "jacobi.csv", "record.json"}) {
        CAPTURE(f);
        CHECK(slurp(a / f) == slurp(b / f));
    }
    for (const auto* f : {"curvature.csv", "geodesic.csv", "entropy.csv", "jacobi.csv"}) {
        CAPTURE(f);
        CHECK(slurp(a / f) == slurp(s / f));
    }
    auto ja = json::parse(slurp(a / "record.json")), js = json::parse(slurp(s / "record.json"));
    for (const auto* k : {"ricci_scalar", "entropy_slope", "slope_ratio", "lyapunov", "lyapunov_ratio", "details"})
        CHECK(ja[k] == js[k]);
}

TEST_CASE("failed run keeps its error chain") {
    const auto dir = scratch("blocked");
    fs::create_directories(dir.parent_path());
    std::ofstream(dir) << "a file where the directory should go";
    const auto rec = run_experiment(ExperimentConfig{}, dir);
    CHECK_FALSE(rec.ok);
    CHECK(rec.error_kind == ErrorKind::Io);
    REQUIRE_FALSE(rec.error_chain.empty());
    CHECK(rec.error_chain[0].find("output") == 0);
    fs::remove(dir);
}

TEST_CASE("sweep") {
    const auto dir = scratch("sweep");
    ExperimentConfig c;
    c.sweep_N = {1, 2, 5};
    c.sweep_lambda = {0.5, 1.0, 2.0};
    c.workers = 3;
    const auto res = run_sweep(c, dir);
    REQUIRE(res.records.size() == 9);
    CHECK(res.summary.rows.size() == 9);
    CHECK(res.all_ok());
    for (const auto& r : res.records) {
        CHECK(r.slope_ratio >= 0.98);
        CHECK(r.slope_ratio <= 1.02);
        CHECK(fs::exists(dir / run_directory_name(r.N, r.lambda_rate) / "record.json"));
    }
    CHECK(fs::exists(dir / "summary.csv"));
    CHECK(fs::exists(dir / "sweep.json"));

    // summary numbers are recomputable from the per-run CSVs
    const auto summary = read_csv(dir / "summary.csv");
    REQUIRE(summary.size() == 10);
    for (std::size_t i = 1; i < summary.size(); ++i) {
        const int N = std::stoi(summary[i][0]);
        const double lam = std::stod(summary[i][1]);
        const auto rows = read_csv(dir / run_directory_name(N, lam) / "entropy.csv");
        std::vector<double> t, s;
        for (std::size_t k = 1; k < rows.size(); ++k) {
            t.push_back(std::stod(rows[k][0]));
            s.push_back(std::stod(rows[k][3]));
        }
        const auto fit = slope_fit(t, s, {20.0 / lam, 40.0 / lam});
        CHECK(fit.slope == doctest::Approx(std::stod(summary[i][3])).epsilon(1e-12));
        const auto jrows = read_csv(dir / run_directory_name(N, lam) / "jacobi.csv");
        std::vector<double> jt, jv;
        for (std::size_t k = 1; k < jrows.size(); ++k) {
            jt.push_back(std::stod(jrows[k][0]));
            jv.push_back(std::stod(jrows[k][1]));
        }
        CHECK(dynamics::lyapunov_estimate(jt, jv, {10.0 / lam, 20.0 / lam}) ==
              doctest::Approx(std::stod(summary[i][5])).epsilon(1e-12));
    }

    ExperimentConfig empty;
    empty.sweep_N = {1};
    CHECK_THROWS_AS(run_sweep(empty, {}), DomainError);
}

TEST_CASE("sweep pairs are validated up front") {
    ExperimentConfig c;
    c.tau_max = 300.0;  // lambda = 3 would need lambda tau = 900
    c.fit_window = Window{150.0, 300.0};
    c.sweep_N = {1};
    c.sweep_lambda = {1.0, 3.0};
    CHECK_THROWS_AS(run_sweep(c, {}), DomainError);
}

TEST_CASE("sweep continues past a failed run") {
    const auto dir = scratch("partial");
    fs::create_directories(dir);
    std::ofstream(dir / run_directory_name(1, 2.0)) << "blocks the run directory";
    ExperimentConfig c;
    c.sweep_N = {1};
    c.sweep_lambda = {1.0, 2.0, 0.5};
    const auto res = run_sweep(c, dir);
    REQUIRE(res.records.size() == 3);
    CHECK(res.records[0].ok);
    CHECK_FALSE(res.records[1].ok);
    CHECK(res.records[1].error_kind == ErrorKind::Io);
    CHECK(res.records[2].ok);
    CHECK_FALSE(res.all_ok());
    CHECK(res.summary.rows[1].back() == "io");
    CHECK(res.summary.rows[2].back() == "ok");
}

TEST_CASE("verification report") {
    const auto rep = run_verification();
    CHECK(rep.all_passed());
    CHECK(rep.checks.size() >= 16);
    CHECK(rep.text().find("[FAIL]") == std::string::npos);
    VerifyOptions mutated;
    mutated.perturb_christoffel_sign = true;
    const auto bad = run_verification(mutated);
    CHECK_FALSE(bad.all_passed());
    const auto comps = bad.failed_components();
    REQUIRE(comps.size() == 1);
    CHECK(comps[0] == "gaussian-manifold/christoffel_at");
    CHECK(bad.to_json()["all_passed"] == false);
}
