#include "runner/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "core/errors.hpp"

namespace igchaos::runner {

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "N",           "lambda",          "Lambda",      "C",           "tau_max",
        "tau_samples", "rel_tol",         "delta_lambda", "fit_window", "lyapunov_window",
        "quad_points", "curvature_samples", "sweep_N",   "sweep_lambda", "workers",
        "output_dir",  "emit_svg",        "rng_seed",    "maxent"};
    return keys;
}

const std::set<std::string>& known_maxent_keys() {
    static const std::set<std::string> keys{"mean", "stddev", "lo", "hi", "nodes", "tolerance", "max_iterations"};
    return keys;
}

template <class T>
T get_as(const json& v, const std::string& key) {
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean())
                throw DomainError("");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer())
                throw DomainError("");
            if constexpr (std::is_unsigned_v<T>) {
                if (v.is_number_unsigned())
                    return v.get<T>();
                if (v.get<std::int64_t>() < 0)
                    throw DomainError("");
            }
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number())
                throw DomainError("");
        } else {
            if (!v.is_string())
                throw DomainError("");
        }
        return v.get<T>();
    } catch (const std::exception&) {
        throw DomainError("config key '" + key + "' has the wrong type: " + v.dump());
    }
}

Window get_window(const json& v, const std::string& key) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw DomainError("config key '" + key + "' must be a [lo, hi] pair of numbers");
    return {v[0].get<double>(), v[1].get<double>()};
}

template <class T>
std::vector<T> get_list(const json& v, const std::string& key) {
    if (!v.is_array())
        throw DomainError("config key '" + key + "' must be an array");
    std::vector<T> out;
    for (const auto& e : v)
        out.push_back(get_as<T>(e, key));
    return out;
}

json window_json(const std::optional<Window>& w) {
    if (!w)
        return nullptr;
    return json::array({w->lo, w->hi});
}

void require(bool ok, const std::string& what) {
    if (!ok)
        throw DomainError(what);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

void check_window(const Window& w, double tau_max, const std::string& name) {
    require(std::isfinite(w.lo) && std::isfinite(w.hi) && w.lo < w.hi,
            name + " must satisfy lo < hi with finite bounds");
    require(w.lo >= 0.0 && w.hi <= tau_max * (1.0 + 1e-12), name + " must lie inside [0, tau_max]");
}

void check_pair(double lambda, double Lambda, int N) {
    require(N >= 1 && N <= 100000, "N must lie in [1, 100000]");
    require(finite_positive(lambda), "lambda must be finite and > 0");
    require(finite_positive(Lambda), "Lambda must be finite and > 0");
}

}  // namespace

void merge_config(ExperimentConfig& c, const json& patch) {
    if (!patch.is_object())
        throw DomainError("config must be a JSON object");
    for (const auto& [key, v] : patch.items()) {
        if (!known_keys().count(key))
            throw DomainError("unknown config key '" + key + "'");
        if (key == "N")
            c.N = get_as<int>(v, key);
        else if (key == "lambda")
            c.lambda_rate = get_as<double>(v, key);
        else if (key == "Lambda")
            c.Lambda = get_as<double>(v, key);
        else if (key == "C")
            c.C = get_as<double>(v, key);
        else if (key == "tau_max")
            c.tau_max = v.is_null() ? std::nullopt : std::optional<double>(get_as<double>(v, key));
        else if (key == "tau_samples")
            c.tau_samples = get_as<int>(v, key);
        else if (key == "rel_tol")
            c.rel_tol = get_as<double>(v, key);
        else if (key == "delta_lambda")
            c.delta_lambda = v.is_null() ? std::nullopt : std::optional<double>(get_as<double>(v, key));
        else if (key == "fit_window")
            c.fit_window = v.is_null() ? std::nullopt : std::optional<Window>(get_window(v, key));
        else if (key == "lyapunov_window")
            c.lyapunov_window = v.is_null() ? std::nullopt : std::optional<Window>(get_window(v, key));
        else if (key == "quad_points")
            c.quad_points = get_as<int>(v, key);
        else if (key == "curvature_samples")
            c.curvature_samples = get_as<int>(v, key);
        else if (key == "sweep_N")
            c.sweep_N = get_list<int>(v, key);
        else if (key == "sweep_lambda")
            c.sweep_lambda = get_list<double>(v, key);
        else if (key == "workers")
            c.workers = get_as<int>(v, key);
        else if (key == "output_dir")
            c.output_dir = get_as<std::string>(v, key);
        else if (key == "emit_svg")
            c.emit_svg = get_as<bool>(v, key);
        else if (key == "rng_seed")
            c.rng_seed = get_as<std::uint64_t>(v, key);
        else if (key == "maxent") {
            if (!v.is_object())
                throw DomainError("config key 'maxent' must be an object");
            for (const auto& [mk, mv] : v.items()) {
                if (!known_maxent_keys().count(mk))
                    throw DomainError("unknown config key 'maxent." + mk + "'");
                const std::string name = "maxent." + mk;
                if (mk == "mean")
                    c.maxent.mean = get_as<double>(mv, name);
                else if (mk == "stddev")
                    c.maxent.stddev = get_as<double>(mv, name);
                else if (mk == "lo")
                    c.maxent.lo = get_as<double>(mv, name);
                else if (mk == "hi")
                    c.maxent.hi = get_as<double>(mv, name);
                else if (mk == "nodes")
                    c.maxent.nodes = get_as<int>(mv, name);
                else if (mk == "tolerance")
                    c.maxent.tolerance = get_as<double>(mv, name);
                else
                    c.maxent.max_iterations = get_as<int>(mv, name);
            }
        }
    }
}

ExperimentConfig config_from_json(const json& doc) {
    ExperimentConfig c;
    merge_config(c, doc);
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw DomainError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(doc);
}

json to_json(const ExperimentConfig& c) {
    return json{{"N", c.N},
                {"lambda", c.lambda_rate},
                {"Lambda", c.Lambda},
                {"C", c.C},
                {"tau_max", c.tau_max ? json(*c.tau_max) : json(nullptr)},
                {"tau_samples", c.tau_samples},
                {"rel_tol", c.rel_tol},
                {"delta_lambda", c.delta_lambda ? json(*c.delta_lambda) : json(nullptr)},
                {"fit_window", window_json(c.fit_window)},
                {"lyapunov_window", window_json(c.lyapunov_window)},
                {"quad_points", c.quad_points},
                {"curvature_samples", c.curvature_samples},
                {"sweep_N", c.sweep_N},
                {"sweep_lambda", c.sweep_lambda},
                {"workers", c.workers},
                {"output_dir", c.output_dir},
                {"emit_svg", c.emit_svg},
                {"rng_seed", c.rng_seed},
                {"maxent",
                 {{"mean", c.maxent.mean},
                  {"stddev", c.maxent.stddev},
                  {"lo", c.maxent.lo},
                  {"hi", c.maxent.hi},
                  {"nodes", c.maxent.nodes},
                  {"tolerance", c.maxent.tolerance},
                  {"max_iterations", c.maxent.max_iterations}}}};
}

json to_json(const ResolvedConfig& r) {
    return json{{"N", r.N},
                {"lambda", r.lambda_rate},
                {"Lambda", r.Lambda},
                {"C", r.C},
                {"tau_max", r.tau_max},
                {"tau_samples", r.tau_samples},
                {"rel_tol", r.rel_tol},
                {"delta_lambda", r.delta_lambda},
                {"fit_window", {r.fit_window.lo, r.fit_window.hi}},
                {"lyapunov_window", {r.lyapunov_window.lo, r.lyapunov_window.hi}},
                {"jlc_check_window", {r.jlc_check_window.lo, r.jlc_check_window.hi}},
                {"quad_points", r.quad_points},
                {"curvature_samples", r.curvature_samples},
                {"rng_seed", r.rng_seed},
                {"emit_svg", r.emit_svg}};
}

void validate(const ExperimentConfig& c) {
    check_pair(c.lambda_rate, c.Lambda, c.N);
    require(std::isfinite(c.C), "C must be finite");
    require(c.tau_samples >= 2 && c.tau_samples <= 1000000, "tau_samples must lie in [2, 1000000]");
    require(c.rel_tol >= 1e-12 && c.rel_tol <= 1e-3, "rel_tol must lie in [1e-12, 1e-3]");
    require(c.quad_points >= 16, "quad_points must be >= 16");
    require(c.curvature_samples >= 0, "curvature_samples must be >= 0");
    require(c.workers >= 0, "workers must be >= 0");
    if (c.tau_max)
        require(finite_positive(*c.tau_max), "tau_max must be finite and > 0");
    for (int n : c.sweep_N)
        require(n >= 1 && n <= 100000, "sweep_N entries must lie in [1, 100000]");
    for (double l : c.sweep_lambda)
        require(finite_positive(l), "sweep_lambda entries must be finite and > 0");

    const auto& m = c.maxent;
    require(std::isfinite(m.mean) && finite_positive(m.stddev), "maxent needs finite mean and stddev > 0");
    require(std::isfinite(m.lo) && std::isfinite(m.hi) && m.lo < m.hi, "maxent grid needs lo < hi");
    require(m.nodes >= 3, "maxent.nodes must be >= 3");
    require(finite_positive(m.tolerance), "maxent.tolerance must be > 0");
    require(m.max_iterations >= 1, "maxent.max_iterations must be >= 1");

    // every (N, lambda) this config can produce must resolve
    const auto Ns = c.sweep_N.empty() ? std::vector<int>{c.N} : c.sweep_N;
    const auto ls = c.sweep_lambda.empty() ? std::vector<double>{c.lambda_rate} : c.sweep_lambda;
    for (int n : Ns)
        for (double l : ls)
            resolve_for(c, n, l);
}

ResolvedConfig resolve_for(const ExperimentConfig& c, int N, double lambda) {
    check_pair(lambda, c.Lambda, N);
    ResolvedConfig r;
    r.N = N;
    r.lambda_rate = lambda;
    r.Lambda = c.Lambda;
    r.C = c.C;
    r.tau_max = c.tau_max.value_or(40.0 / lambda);
    require(finite_positive(r.tau_max), "tau_max must be finite and > 0");
    require(lambda * r.tau_max <= 700.0, "lambda * tau_max must not exceed 700");
    r.tau_samples = c.tau_samples;
    r.rel_tol = c.rel_tol;
    r.delta_lambda = c.delta_lambda.value_or(1e-5 * lambda);
    require(r.delta_lambda >= 1e-8 * lambda && r.delta_lambda <= 1e-3 * lambda,
            "delta_lambda must lie in [1e-8, 1e-3] * lambda");
    r.fit_window = c.fit_window.value_or(Window{r.tau_max / 2.0, r.tau_max});
    r.lyapunov_window = c.lyapunov_window.value_or(Window{r.tau_max / 4.0, r.tau_max / 2.0});
    check_window(r.fit_window, r.tau_max, "fit_window");
    check_window(r.lyapunov_window, r.tau_max, "lyapunov_window");
    r.jlc_check_window = {0.0, std::min(10.0 / lambda, r.tau_max)};
    r.quad_points = c.quad_points;
    r.curvature_samples = c.curvature_samples;
    r.rng_seed = c.rng_seed;
    r.emit_svg = c.emit_svg;
    return r;
}

ResolvedConfig resolve(const ExperimentConfig& c) {
    return resolve_for(c, c.N, c.lambda_rate);
}

GeodesicParams ResolvedConfig::params() const {
    GeodesicParams p;
    p.n = N;
    p.Lambda = Lambda;
    p.lambda_rate = lambda_rate;
    p.C = C;
    p.validate();
    return p;
}

std::vector<double> ResolvedConfig::tau_grid() const {
    std::vector<double> g(static_cast<std::size_t>(tau_samples));
    for (int i = 0; i < tau_samples; ++i)
        g[i] = tau_max * i / (tau_samples - 1);
    g.back() = tau_max;
    return g;
}

}  // namespace igchaos::runner
