#include "igchaos/igchaos.h"

#include <new>
#include <string>

#include "core/errors.hpp"
#include "core/manifold.hpp"
#include "runner/config.hpp"
#include "runner/experiment.hpp"
#include "runner/verify.hpp"

using namespace igchaos;
using namespace igchaos::runner;

struct igc_config {
    ExperimentConfig value;
};

struct igc_result {
    std::string text;
    std::string aux;
};

namespace {

thread_local std::string last_error;

igc_status fail(igc_status s, const std::string& what) {
    last_error = what;
    return s;
}

template <class F>
igc_status guarded(F&& body) {
    last_error.clear();
    try {
        return body();
    } catch (const DomainError& e) {
        return fail(IGC_ERR_VALIDATION, e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(IGC_ERR_VALIDATION, e.what());
    } catch (const NumericalError& e) {
        return fail(IGC_ERR_NUMERICAL, e.what());
    } catch (const IoError& e) {
        return fail(IGC_ERR_IO, e.what());
    } catch (const std::bad_alloc&) {
        return fail(IGC_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(IGC_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(IGC_ERR_INTERNAL, "unknown error");
    }
}

igc_status from_kind(ErrorKind k) {
    switch (k) {
    case ErrorKind::None:
        return IGC_OK;
    case ErrorKind::Validation:
        return IGC_ERR_VALIDATION;
    case ErrorKind::Numerical:
        return IGC_ERR_NUMERICAL;
    case ErrorKind::Io:
        return IGC_ERR_IO;
    case ErrorKind::Internal:
        return IGC_ERR_INTERNAL;
    }
    return IGC_ERR_INTERNAL;
}

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty())
            out += "; ";
        out += p;
    }
    return out;
}

ThetaPoint point_from(const double* blocks, size_t block_count) {
    std::vector<Block> b(block_count);
    for (size_t k = 0; k < block_count; ++k)
        b[k] = {blocks[2 * k], blocks[2 * k + 1]};
    return ThetaPoint(std::move(b));
}

ResolvedConfig resolved(const igc_config* config) {
    validate(config->value);
    return resolve(config->value);
}

igc_status emit(igc_result** out, std::string text, std::string aux = {}) {
    *out = new igc_result{std::move(text), std::move(aux)};
    return IGC_OK;
}

}  // namespace

extern "C" {

const char* igc_version(void) { return "1.0.0"; }

const char* igc_last_error(void) { return last_error.c_str(); }

const char* igc_status_name(igc_status status) {
    switch (status) {
    case IGC_OK:
        return "ok";
    case IGC_ERR_VALIDATION:
        return "validation error";
    case IGC_ERR_NUMERICAL:
        return "numerical failure";
    case IGC_ERR_VERIFICATION:
        return "verification failure";
    case IGC_ERR_IO:
        return "i/o error";
    case IGC_ERR_NULL_ARG:
        return "null argument";
    case IGC_ERR_INTERNAL:
        return "internal error";
    }
    return "unknown status";
}

igc_status igc_config_create(igc_config** out) {
    if (!out)
        return fail(IGC_ERR_NULL_ARG, "out is NULL");
    return guarded([&] {
        *out = new igc_config{};
        return IGC_OK;
    });
}

igc_status igc_config_from_json(const char* text, igc_config** out) {
    if (!text || !out)
        return fail(IGC_ERR_NULL_ARG, "json and out must be non-NULL");
    return guarded([&] {
        const auto doc = nlohmann::json::parse(text);
        *out = new igc_config{config_from_json(doc)};
        return IGC_OK;
    });
}

igc_status igc_config_load(const char* path, igc_config** out) {
    if (!path || !out)
        return fail(IGC_ERR_NULL_ARG, "path and out must be non-NULL");
    return guarded([&] {
        *out = new igc_config{load_config(path)};
        return IGC_OK;
    });
}

igc_status igc_config_set(igc_config* config, const char* key, const char* json_value) {
    if (!config || !key || !json_value)
        return fail(IGC_ERR_NULL_ARG, "config, key and value must be non-NULL");
    return guarded([&] {
        nlohmann::json value;
        try {
            value = nlohmann::json::parse(json_value);
        } catch (const nlohmann::json::parse_error&) {
            throw DomainError(std::string("value for '") + key + "' is not valid JSON: " + json_value);
        }
        // stage on a copy so a rejected value leaves the config untouched
        auto staged = config->value;
        merge_config(staged, nlohmann::json{{key, value}});
        validate(staged);
        config->value = std::move(staged);
        return IGC_OK;
    });
}

igc_status igc_config_to_json(const igc_config* config, igc_result** out) {
    if (!config || !out)
        return fail(IGC_ERR_NULL_ARG, "config and out must be non-NULL");
    return guarded([&] { return emit(out, to_json(config->value).dump(2) + "\n"); });
}

void igc_config_destroy(igc_config* config) { delete config; }

igc_status igc_ricci_scalar(const double* blocks, size_t block_count, double* out) {
    if (!blocks || !out)
        return fail(IGC_ERR_NULL_ARG, "blocks and out must be non-NULL");
    return guarded([&] {
        *out = ricci_scalar_at(point_from(blocks, block_count));
        return IGC_OK;
    });
}

igc_status igc_metric(const double* blocks, size_t block_count, double* out) {
    if (!blocks || !out)
        return fail(IGC_ERR_NULL_ARG, "blocks and out must be non-NULL");
    return guarded([&] {
        const auto g = metric_at(point_from(blocks, block_count));
        for (size_t k = 0; k < g.size(); ++k) {
            out[2 * k] = g[k].g_mumu;
            out[2 * k + 1] = g[k].g_sigmasigma;
        }
        return IGC_OK;
    });
}

igc_status igc_christoffel(const double* blocks, size_t block_count, double* out) {
    if (!blocks || !out)
        return fail(IGC_ERR_NULL_ARG, "blocks and out must be non-NULL");
    return guarded([&] {
        const auto g = christoffel_at(point_from(blocks, block_count));
        for (size_t k = 0; k < g.size(); ++k) {
            out[3 * k] = g[k].mu_musigma;
            out[3 * k + 1] = g[k].sigma_mumu;
            out[3 * k + 2] = g[k].sigma_sigmasigma;
        }
        return IGC_OK;
    });
}

igc_status igc_sectional_curvature(const double* blocks, size_t block_count, size_t a, size_t b, double* out) {
    if (!blocks || !out)
        return fail(IGC_ERR_NULL_ARG, "blocks and out must be non-NULL");
    return guarded([&] {
        *out = sectional_curvature_at(point_from(blocks, block_count), {a, b});
        return IGC_OK;
    });
}

igc_status igc_analytic_geodesic(const igc_config* config, double tau, double* out, size_t out_len) {
    if (!config || !out)
        return fail(IGC_ERR_NULL_ARG, "config and out must be non-NULL");
    return guarded([&] {
        const auto r = resolved(config);
        const auto s = analytic_geodesic_eval(r.params(), tau);
        if (out_len < 4 * s.point.block_count())
            throw DomainError("output buffer needs " + std::to_string(4 * s.point.block_count()) + " entries");
        for (size_t k = 0; k < s.point.block_count(); ++k) {
            out[4 * k] = s.point[k].mu;
            out[4 * k + 1] = s.point[k].sigma;
            out[4 * k + 2] = s.velocity[k].dmu;
            out[4 * k + 3] = s.velocity[k].dsigma;
        }
        return IGC_OK;
    });
}

igc_status igc_curvature_csv(const igc_config* config, igc_result** out) {
    if (!config || !out)
        return fail(IGC_ERR_NULL_ARG, "config and out must be non-NULL");
    return guarded([&] { return emit(out, curvature_table(resolved(config)).str()); });
}

igc_status igc_geodesic_csv(const igc_config* config, igc_result** out) {
    if (!config || !out)
        return fail(IGC_ERR_NULL_ARG, "config and out must be non-NULL");
    return guarded([&] { return emit(out, geodesic_table(numeric_geodesic(resolved(config))).str()); });
}

igc_status igc_jacobi_csv(const igc_config* config, igc_result** out) {
    if (!config || !out)
        return fail(IGC_ERR_NULL_ARG, "config and out must be non-NULL");
    return guarded([&] {
        const auto r = resolved(config);
        const auto geo = numeric_geodesic(r);
        return emit(out, jacobi_table(numeric_jacobi(r, geo)).str());
    });
}

igc_status igc_entropy_csv(const igc_config* config, igc_result** out) {
    if (!config || !out)
        return fail(IGC_ERR_NULL_ARG, "config and out must be non-NULL");
    return guarded([&] {
        const auto r = resolved(config);
        const auto s = entropy_series(r);
        return emit(out, entropy_table(s).str(), entropy_summary(r, s).dump(2) + "\n");
    });
}

igc_status igc_maxent_csv(const igc_config* config, igc_result** out) {
    if (!config || !out)
        return fail(IGC_ERR_NULL_ARG, "config and out must be non-NULL");
    return guarded([&] {
        validate(config->value);
        const auto& m = config->value.maxent;
        const auto sol = solve_maxent(m);
        const nlohmann::json info{{"alpha", sol.alpha},
                                  {"beta", sol.beta},
                                  {"iterations", sol.iterations},
                                  {"residual_history", sol.residual_history}};
        return emit(out, maxent_table(sol, m).str(), info.dump(2) + "\n");
    });
}

igc_status igc_run(const igc_config* config, const char* out_dir, igc_result** out) {
    if (!config || !out)
        return fail(IGC_ERR_NULL_ARG, "config and out must be non-NULL");
    return guarded([&] {
        const auto rec = run_experiment(config->value, out_dir ? out_dir : "");
        emit(out, rec.to_json().dump(2) + "\n");
        if (!rec.ok)
            return fail(from_kind(rec.error_kind), join(rec.error_chain));
        return IGC_OK;
    });
}

igc_status igc_sweep(const igc_config* config, const char* out_dir, igc_result** out) {
    if (!config || !out)
        return fail(IGC_ERR_NULL_ARG, "config and out must be non-NULL");
    return guarded([&] {
        const auto res = run_sweep(config->value, out_dir ? out_dir : "");
        nlohmann::json records = nlohmann::json::array();
        for (const auto& r : res.records)
            records.push_back(r.to_json());
        emit(out, res.summary.str(), records.dump(2) + "\n");
        for (const auto& r : res.records)
            if (!r.ok)
                return fail(from_kind(r.error_kind), run_directory_name(r.N, r.lambda_rate) + ": " +
                                                         join(r.error_chain));
        return IGC_OK;
    });
}

igc_status igc_verify(const char* options_json, igc_result** out) {
    if (!out)
        return fail(IGC_ERR_NULL_ARG, "out must be non-NULL");
    return guarded([&] {
        VerifyOptions opts;
        if (options_json && *options_json) {
            const auto doc = nlohmann::json::parse(options_json);
            if (!doc.is_object())
                throw DomainError("verify options must be a JSON object");
            for (const auto& [k, v] : doc.items()) {
                if (k == "rng_seed")
                    opts.rng_seed = v.get<std::uint64_t>();
                else if (k == "perturb_christoffel_sign")
                    opts.perturb_christoffel_sign = v.get<bool>();
                else
                    throw DomainError("unknown verify option '" + k + "'");
            }
        }
        const auto report = run_verification(opts);
        emit(out, report.text(), report.to_json().dump(2) + "\n");
        if (!report.all_passed())
            return fail(IGC_ERR_VERIFICATION, "failed: " + join(report.failed_components()));
        return IGC_OK;
    });
}

const char* igc_result_text(const igc_result* result) { return result ? result->text.c_str() : ""; }

const char* igc_result_aux(const igc_result* result) { return result ? result->aux.c_str() : ""; }

void igc_result_destroy(igc_result* result) { delete result; }

}  // extern "C"
