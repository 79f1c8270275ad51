/* tmekit — hybrid PDE–ODE tumor-microenvironment simulation and mode-wise
 * stability toolkit. C API: opaque handles, status codes, thread-local error
 * text. Link against the tmekit shared library. */

#ifndef TMEKIT_H
#define TMEKIT_H

#include <stddef.h>

#if defined(_WIN32)
#define TMK_API __declspec(dllexport)
#else
#define TMK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tmk_status {
  TMK_OK = 0,
  TMK_EINVAL = 1,    /* bad argument / domain error */
  TMK_ECONFIG = 2,   /* configuration file problem */
  TMK_EDIVERGED = 3, /* numerical divergence during a run */
  TMK_ECHECK = 4,    /* scenario executed but a check failed */
  TMK_EINTERNAL = 5
} tmk_status;

typedef struct tmk_config tmk_config;
typedef struct tmk_report tmk_report;

TMK_API const char* tmk_version(void);

/* Message for the most recent failure on this thread; empty string if none. */
TMK_API const char* tmk_last_error(void);

/* ---- scenario configs ---------------------------------------------------- */

TMK_API tmk_status tmk_config_load(const char* path, tmk_config** out);
TMK_API tmk_status tmk_config_load_text(const char* text, tmk_config** out);

/* Override one `section.key` value (e.g. "scenario.out_dir", "scenario.seed").
 * The full config is re-validated. */
TMK_API tmk_status tmk_config_set(tmk_config* cfg, const char* key, const char* value);

/* Canonical echo of the config with all defaults resolved; the returned
 * buffer lives until the config is freed or echoed again. */
TMK_API const char* tmk_config_echo(tmk_config* cfg);

TMK_API void tmk_config_free(tmk_config* cfg);

/* ---- scenario execution -------------------------------------------------- */

/* Runs the scenario, writing artifacts under the configured output directory.
 * Returns TMK_OK when all checks pass, TMK_ECHECK when the scenario ran but a
 * check failed (report still produced), TMK_EDIVERGED on numerical
 * divergence (partial artifacts retained). */
TMK_API tmk_status tmk_run_scenario(const tmk_config* cfg, tmk_report** out);

TMK_API int tmk_report_check_count(const tmk_report* rep);
TMK_API tmk_status tmk_report_check_name(const tmk_report* rep, int index, const char** name);
TMK_API tmk_status tmk_report_check_info(const tmk_report* rep, int index, int* passed,
                                         double* measured, double* bound);
TMK_API int tmk_report_all_passed(const tmk_report* rep);
TMK_API int tmk_report_diverged(const tmk_report* rep);
TMK_API const char* tmk_report_summary(const tmk_report* rep);
TMK_API void tmk_report_free(tmk_report* rep);

/* ---- closed-form evaluations --------------------------------------------- */

/* Coexistence equilibrium S* = xi K / (alpha + xi), R* = alpha K / (alpha + xi). */
TMK_API tmk_status tmk_coexistence_equilibrium(double K, double alpha, double xi,
                                               double* S_star, double* R_star);

/* Dispersion coefficients of the base reaction-diffusion block at one Neumann
 * eigenvalue: a1, a0 of mu^2 + a1 mu + a0 = 0, and the max real root part. */
TMK_API tmk_status tmk_base_dispersion(double lambda_S, double lambda_R, double K, double alpha,
                                       double xi, double d_S, double d_R, double lambda,
                                       double* a1, double* a0, double* mu_plus);

/* Two-way trace/determinant classification. classification codes:
 * 0 kinetically_unstable, 1 stable, 2 trace_unstable, 3 det_case_i,
 * 4 det_case_ii, 5 det_case_iii. regimes is a bitmask S1..S4 = bits 0..3.
 * lambda_hi is set to HUGE_VAL for the open cases. */
TMK_API tmk_status tmk_twoway_classify(double lambda_S, double lambda_R, double K, double alpha,
                                       double xi, double d_S, double d_R, double chi_S,
                                       double chi_R, double g_S, double g_R,
                                       int* classification, double* A1, double* A2, double* detJ,
                                       double* lambda_lo, double* lambda_hi, unsigned* regimes);

#ifdef __cplusplus
}
#endif

#endif /* TMEKIT_H */
