/*
 * C interface to the csrkn library: symmetric Runge-Kutta-Nystrom methods
 * built from continuous-stage Legendre coefficients and quadrature.
 *
 * All objects are opaque handles created by csrkn_*_create/named/... and
 * released by the matching csrkn_*_free. Every fallible call returns a
 * csrkn_status; on failure csrkn_last_error() describes the problem. The
 * error text is thread-local and valid until the next failing call on the
 * same thread. Handles are immutable after creation and may be shared
 * between threads.
 */
#ifndef CSRKN_H
#define CSRKN_H

#include <stddef.h>

#if defined(CSRKN_BUILDING_LIBRARY)
#define CSRKN_API __attribute__((visibility("default")))
#else
#define CSRKN_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum csrkn_status {
    CSRKN_OK = 0,
    CSRKN_E_INVALID_ARGUMENT = 1,
    CSRKN_E_DEGREE_OVERFLOW = 2,
    CSRKN_E_UNSUPPORTED_STAGES = 3,
    CSRKN_E_SYMMETRY_VIOLATION = 4,
    CSRKN_E_EXPANSION_CONSTRAINT = 5,
    CSRKN_E_STAGE_DIVERGENCE = 6,
    CSRKN_E_INVALID_GRID = 7,
    CSRKN_E_DEGENERATE_FIT = 8,
    CSRKN_E_PARSE = 9,
    CSRKN_E_IO = 10,
    CSRKN_E_BUFFER_TOO_SMALL = 11,
    CSRKN_E_INTERNAL = 12
} csrkn_status;

typedef struct csrkn_tableau csrkn_tableau;
typedef struct csrkn_problem csrkn_problem;
typedef struct csrkn_trajectory csrkn_trajectory;

typedef enum csrkn_family {
    CSRKN_FAMILY_ORDER2 = 0,   /* uses alpha */
    CSRKN_FAMILY_ORDER4 = 1,   /* uses alpha, beta, gamma */
    CSRKN_FAMILY_ORDER6 = 2,   /* uses alpha */
    CSRKN_FAMILY_EXPANSION = 3 /* uses eta, zeta; free coefficients zero */
} csrkn_family;

typedef struct csrkn_family_params {
    csrkn_family family;
    double alpha;
    double beta;
    double gamma;
    int eta;
    int zeta;
} csrkn_family_params;

typedef enum csrkn_quadrature {
    CSRKN_QUADRATURE_GAUSS = 0,
    CSRKN_QUADRATURE_LOBATTO = 1
} csrkn_quadrature;

typedef enum csrkn_stage_structure {
    CSRKN_STAGES_AUTO = 0,
    CSRKN_STAGES_FULL_IMPLICIT = 1,
    CSRKN_STAGES_SEQUENTIAL = 2
} csrkn_stage_structure;

typedef struct csrkn_step_config {
    double h;
    double stage_tol;
    int max_iters;
    csrkn_stage_structure structure;
} csrkn_step_config;

/* Algebraic properties of a tableau. Booleans are 0/1. */
typedef struct csrkn_report {
    int stages;
    int symmetric;
    double symmetry_deviation;
    int symplectic;
    double symplecticity_residual;
    int xi;
    int eta;
    int zeta;
    int order_bound;     /* min(xi, 2 eta + 2, eta + zeta); 0 if inconsistent */
    int bbar_consistent; /* b_bar_i = b_i (1 - c_i) */
} csrkn_report;

CSRKN_API const char* csrkn_version(void);
CSRKN_API const char* csrkn_status_string(csrkn_status status);
CSRKN_API const char* csrkn_last_error(void);

/* h = 0 (caller sets it), stage_tol = 1e-14, max_iters = 100, auto structure. */
CSRKN_API void csrkn_step_config_default(csrkn_step_config* cfg);

/* ---- tableaus ---------------------------------------------------------- */

/* name: rkn-iiia, rkn-iiib, diagsymp, rkn-a, rkn-b */
CSRKN_API csrkn_status csrkn_tableau_named(const char* name, csrkn_tableau** out);
CSRKN_API csrkn_status csrkn_tableau_from_family(const csrkn_family_params* params,
                                                 csrkn_quadrature quadrature, int stages,
                                                 csrkn_tableau** out);
/* a_bar is s*s doubles, row-major. label may be NULL. */
CSRKN_API csrkn_status csrkn_tableau_from_arrays(int s, const double* c, const double* a_bar,
                                                 const double* b_bar, const double* b,
                                                 const char* label, csrkn_tableau** out);
CSRKN_API csrkn_status csrkn_tableau_load(const char* path, csrkn_tableau** out);
CSRKN_API csrkn_status csrkn_tableau_parse(const char* text, csrkn_tableau** out);
CSRKN_API csrkn_status csrkn_tableau_save(const csrkn_tableau* t, const char* path);
/* Writes the rkn-tableau/1 text including the terminating NUL. *needed
 * receives the required capacity; buf may be NULL to query it. */
CSRKN_API csrkn_status csrkn_tableau_to_json(const csrkn_tableau* t, char* buf, size_t cap,
                                             size_t* needed);
CSRKN_API csrkn_status csrkn_tableau_adjoint(const csrkn_tableau* t, csrkn_tableau** out);
CSRKN_API void csrkn_tableau_free(csrkn_tableau* t);

CSRKN_API int csrkn_tableau_stages(const csrkn_tableau* t);
CSRKN_API const char* csrkn_tableau_label(const csrkn_tableau* t);
/* Any output pointer may be NULL. a_bar receives s*s doubles, row-major. */
CSRKN_API csrkn_status csrkn_tableau_coefficients(const csrkn_tableau* t, double* c,
                                                  double* a_bar, double* b_bar, double* b);
/* Property verifiers at the default tolerance 1e-12. */
CSRKN_API csrkn_status csrkn_tableau_analyze(const csrkn_tableau* t, csrkn_report* out);

/* ---- problems ---------------------------------------------------------- */

/* name: pendulum, harmonic, kepler */
CSRKN_API csrkn_status csrkn_problem_create(const char* name, csrkn_problem** out);
CSRKN_API void csrkn_problem_free(csrkn_problem* p);
CSRKN_API int csrkn_problem_dim(const csrkn_problem* p);
CSRKN_API int csrkn_problem_has_energy(const csrkn_problem* p);

/* ---- integration ------------------------------------------------------- */

/* On a stage failure mid-run, *out still receives the partial trajectory
 * and CSRKN_E_STAGE_DIVERGENCE is returned. */
CSRKN_API csrkn_status csrkn_integrate(const csrkn_tableau* t, const csrkn_problem* p,
                                       double t_end, const csrkn_step_config* cfg,
                                       int sample_every, csrkn_trajectory** out);
CSRKN_API void csrkn_trajectory_free(csrkn_trajectory* tr);
CSRKN_API size_t csrkn_trajectory_size(const csrkn_trajectory* tr);
CSRKN_API int csrkn_trajectory_dim(const csrkn_trajectory* tr);
CSRKN_API const double* csrkn_trajectory_times(const csrkn_trajectory* tr);
/* size * dim doubles, sample-major. */
CSRKN_API const double* csrkn_trajectory_q(const csrkn_trajectory* tr);
CSRKN_API const double* csrkn_trajectory_p(const csrkn_trajectory* tr);
/* NULL when the problem has no energy. */
CSRKN_API const double* csrkn_trajectory_energy_error(const csrkn_trajectory* tr);
CSRKN_API int csrkn_trajectory_failed(const csrkn_trajectory* tr);
/* Least-squares drift slope and max |energy error| over every step. */
CSRKN_API csrkn_status csrkn_trajectory_drift(const csrkn_trajectory* tr, double* slope,
                                              double* max_abs);

/* errors receives n values (NaN where the solver failed, in which case
 * CSRKN_E_STAGE_DIVERGENCE is returned after filling every row). reference
 * may be NULL; otherwise it receives a NUL-terminated description,
 * truncated to reference_cap. */
CSRKN_API csrkn_status csrkn_global_error_study(const csrkn_tableau* t, const csrkn_problem* p,
                                                double t_end, const double* h, size_t n,
                                                const csrkn_step_config* cfg, double* errors,
                                                double* slope, char* reference,
                                                size_t reference_cap);

/* Deviation |rho Phi_h(rho Phi_h(z0)) - z0| with rho(q, p) = (q, -p). */
CSRKN_API csrkn_status csrkn_reversibility_test(const csrkn_tableau* t, const csrkn_problem* p,
                                                const csrkn_step_config* cfg,
                                                double* deviation);

#ifdef __cplusplus
}
#endif

#endif /* CSRKN_H */
