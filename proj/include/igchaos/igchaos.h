#ifndef IGCHAOS_IGCHAOS_H
#define IGCHAOS_IGCHAOS_H

/*
 * C interface to the information-geometric chaos simulator.
 *
 * Every function returns an igc_status. On failure a description is available
 * from igc_last_error() on the calling thread until the next call into the
 * library from that thread. Objects are opaque handles released with their
 * matching destroy function; passing NULL to a destroy function is a no-op.
 * Strings returned by accessors are owned by the handle they came from.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(IGC_BUILDING_LIBRARY)
#define IGC_API __declspec(dllexport)
#else
#define IGC_API __declspec(dllimport)
#endif
#else
#define IGC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum igc_status {
    IGC_OK = 0,
    IGC_ERR_VALIDATION = 1,   /* invalid configuration or arguments */
    IGC_ERR_NUMERICAL = 2,    /* a numerical procedure failed */
    IGC_ERR_VERIFICATION = 3, /* a verification check failed */
    IGC_ERR_IO = 4,           /* file system error */
    IGC_ERR_NULL_ARG = 5,     /* a required pointer was NULL */
    IGC_ERR_INTERNAL = 6
} igc_status;

typedef struct igc_config igc_config;
typedef struct igc_result igc_result;

IGC_API const char* igc_version(void);
IGC_API const char* igc_last_error(void);
IGC_API const char* igc_status_name(igc_status status);

/* ---- configuration ---------------------------------------------------- */

IGC_API igc_status igc_config_create(igc_config** out);
/* Parse a JSON document; unknown keys are rejected. */
IGC_API igc_status igc_config_from_json(const char* json, igc_config** out);
IGC_API igc_status igc_config_load(const char* path, igc_config** out);
/* Override one key with a JSON-encoded value, e.g. ("N", "5") or ("fit_window", "[20,40]"). */
IGC_API igc_status igc_config_set(igc_config* config, const char* key, const char* json_value);
/* Effective configuration as JSON; release with igc_result_destroy. */
IGC_API igc_status igc_config_to_json(const igc_config* config, igc_result** out);
IGC_API void igc_config_destroy(igc_config* config);

/* ---- point geometry ---------------------------------------------------- */

/* A point is given as 3N (mu, sigma) pairs packed in `blocks` (length 2 * block_count). */
IGC_API igc_status igc_ricci_scalar(const double* blocks, size_t block_count, double* out);
/* Writes g_mumu, g_sigmasigma per block into out (length 2 * block_count). */
IGC_API igc_status igc_metric(const double* blocks, size_t block_count, double* out);
/* Writes Gamma^mu_{mu sigma}, Gamma^sigma_{mu mu}, Gamma^sigma_{sigma sigma} per block (length 3 * block_count). */
IGC_API igc_status igc_christoffel(const double* blocks, size_t block_count, double* out);
/* Sectional curvature of the coordinate plane (a, b); flat index 2k is mu_k, 2k+1 is sigma_k. */
IGC_API igc_status igc_sectional_curvature(const double* blocks, size_t block_count, size_t a, size_t b,
                                           double* out);
/* Closed-form geodesic of the configuration at tau: (mu, sigma, dmu, dsigma) per block (length 4 * 3N). */
IGC_API igc_status igc_analytic_geodesic(const igc_config* config, double tau, double* out, size_t out_len);

/* ---- tables ------------------------------------------------------------ */

/* Each producer returns CSV text in the result; igc_entropy_csv also attaches
 * a JSON summary of the fitted slope as the auxiliary text. */
IGC_API igc_status igc_curvature_csv(const igc_config* config, igc_result** out);
IGC_API igc_status igc_geodesic_csv(const igc_config* config, igc_result** out);
IGC_API igc_status igc_jacobi_csv(const igc_config* config, igc_result** out);
IGC_API igc_status igc_entropy_csv(const igc_config* config, igc_result** out);
IGC_API igc_status igc_maxent_csv(const igc_config* config, igc_result** out);

/* ---- experiments -------------------------------------------------------- */

/* Run one experiment; artifacts go to out_dir when it is non-NULL and non-empty.
 * The result text is the run record as JSON. A failed run still yields its
 * record and returns the status of the first failing stage. */
IGC_API igc_status igc_run(const igc_config* config, const char* out_dir, igc_result** out);
/* Sweep over the configured sweep_N x sweep_lambda lists. The result text is
 * the summary CSV and the auxiliary text a JSON array of run records. */
IGC_API igc_status igc_sweep(const igc_config* config, const char* out_dir, igc_result** out);
/* Run every oracle cross-check. options_json may be NULL or an object with
 * "rng_seed" and "perturb_christoffel_sign". The result text is a readable
 * report, the auxiliary text its JSON form; IGC_ERR_VERIFICATION if any check fails. */
IGC_API igc_status igc_verify(const char* options_json, igc_result** out);

/* ---- results ------------------------------------------------------------ */

IGC_API const char* igc_result_text(const igc_result* result);
IGC_API const char* igc_result_aux(const igc_result* result);
IGC_API void igc_result_destroy(igc_result* result);

#ifdef __cplusplus
}
#endif

#endif
