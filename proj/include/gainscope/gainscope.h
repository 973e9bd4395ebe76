/* gainscope: certified parameter-dependent gain bounds for uncertain LTI systems.
 *
 * Opaque handles, status codes, caller-owned output buffers. Every function
 * that can fail returns gs_status; gs_last_error() gives the message of the
 * most recent failure on the calling thread.
 */
#ifndef GAINSCOPE_H
#define GAINSCOPE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(GAINSCOPE_BUILD)
#define GS_API __declspec(dllexport)
#else
#define GS_API __declspec(dllimport)
#endif
#else
#define GS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gs_status {
  GS_OK = 0,
  GS_ERR_IO = 1,
  GS_ERR_PARSE = 2,          /* malformed system or certificate text */
  GS_ERR_INVALID_ARG = 3,
  GS_ERR_PRECONDITION = 4,   /* e.g. nonzero feedthrough on the H2 path, non-Hurwitz sample */
  GS_ERR_SINGULAR = 5,       /* parameter singularity or non-Hurwitz point in an oracle */
  GS_ERR_UNSUPPORTED = 6,
  GS_ERR_INTERNAL = 7
} gs_status;

typedef enum gs_kind {
  GS_KIND_S2O_UPPER = 0,
  GS_KIND_S2O_LOWER = 1,
  GS_KIND_L2 = 2,
  GS_KIND_H2 = 3
} gs_kind;

typedef enum gs_solver_status {
  GS_SOLVER_OPTIMAL = 0,
  GS_SOLVER_INFEASIBLE = 1,
  GS_SOLVER_UNBOUNDED = 2,
  GS_SOLVER_NUMERICAL_LIMIT = 3
} gs_solver_status;

typedef struct gs_system gs_system;
typedef struct gs_bound gs_bound;
typedef struct gs_certificate gs_certificate;

GS_API const char* gs_version(void);
GS_API const char* gs_status_string(gs_status s);
GS_API const char* gs_last_error(void);
GS_API gs_status gs_kind_parse(const char* text, gs_kind* out);
GS_API const char* gs_kind_string(gs_kind k);

/* ---- systems ---- */
GS_API gs_status gs_system_load_file(const char* path, gs_system** out);
GS_API gs_status gs_system_load_text(const char* text, gs_system** out);
GS_API void gs_system_free(gs_system* s);
GS_API gs_status gs_system_dims(const gs_system* s, int* n, int* m, int* p, int* ntheta);
GS_API gs_status gs_system_theta_star(const gs_system* s, double* out, int len);
/* Box bounds of the domain in the analysis coordinates; GS_ERR_UNSUPPORTED
 * when the domain is not one interval per parameter. */
GS_API gs_status gs_system_box(const gs_system* s, double* lo, double* hi, int len);
GS_API uint64_t gs_system_hash(const gs_system* s);
/* Copies a NUL-terminated string into buf; *needed receives the full size
 * including the terminator. Same convention for every *_string getter. */
GS_API gs_status gs_system_serialize(const gs_system* s, char* buf, size_t cap, size_t* needed);
/* Largest eigenvalue real part of A(theta) over the sample grid (res points
 * per axis over the domain box). */
GS_API gs_status gs_system_hurwitz_check(const gs_system* s, int res, double* worst, int* all_stable);

/* ---- pointwise oracles (squared quantities) ---- */
GS_API gs_status gs_oracle(const gs_system* s, gs_kind kind, const double* theta, int len, int full_output,
                           double* out);

typedef struct gs_invariance {
  double ss_mismatch;
  double numerator_norm;
  int ss_invariant;
  int fully_invariant;
  int variant_disagrees;
} gs_invariance;

GS_API gs_status gs_invariance_eval(const gs_system* s, const double* theta, int len, int input, double tol,
                                    gs_invariance* out);

/* ---- bound synthesis ---- */
typedef struct gs_options {
  int deg_v, deg_m, deg_p1, deg_p2, deg_gn, deg_gd;
  int pin_nominal;
  int full_output;
  double tol_solver;
  double tol_psd;
  double tol_match;
  int max_iter;
  const char* sdpa_export; /* NULL or path */
} gs_options;

GS_API void gs_options_default(gs_options* o);

/* Returns GS_OK whenever the program was built and solved, whatever the
 * solver outcome; inspect gs_bound_solver_status and gs_bound_valid. */
GS_API gs_status gs_bound_synthesize(const gs_system* s, gs_kind kind, const gs_options* o, gs_bound** out);
GS_API void gs_bound_free(gs_bound* b);
GS_API gs_solver_status gs_bound_solver_status(const gs_bound* b);
GS_API int gs_bound_valid(const gs_bound* b);
GS_API int gs_bound_iterations(const gs_bound* b);
GS_API double gs_bound_objective(const gs_bound* b);
GS_API gs_status gs_bound_eval(const gs_bound* b, const double* theta, int len, double* out);
GS_API gs_status gs_bound_sdp_size(const gs_bound* b, int* rows, int* blocks, int* largest_block);
GS_API gs_status gs_bound_numerator_string(const gs_bound* b, char* buf, size_t cap, size_t* needed);
GS_API gs_status gs_bound_denominator_string(const gs_bound* b, char* buf, size_t cap, size_t* needed);
GS_API gs_status gs_bound_message(const gs_bound* b, char* buf, size_t cap, size_t* needed);
/* Borrowed; lives as long as the bound. */
GS_API const gs_certificate* gs_bound_certificate(const gs_bound* b);

/* ---- certificates ---- */
GS_API gs_status gs_certificate_read(const char* path, gs_certificate** out);
GS_API gs_status gs_certificate_write(const gs_certificate* c, const char* path);
GS_API void gs_certificate_free(gs_certificate* c);
GS_API int gs_certificate_valid(const gs_certificate* c);
GS_API double gs_certificate_coeff_residual(const gs_certificate* c);
GS_API double gs_certificate_min_eig(const gs_certificate* c);
GS_API gs_status gs_certificate_reason(const gs_certificate* c, char* buf, size_t cap, size_t* needed);
/* GS_ERR_INVALID_ARG when the key is absent. */
GS_API gs_status gs_certificate_meta(const gs_certificate* c, const char* key, char* buf, size_t cap, size_t* needed);
GS_API gs_status gs_certificate_eval(const gs_certificate* c, const double* theta, int len, double* out);

typedef struct gs_certify_report {
  int valid;
  int hash_matches;
  int dominance_ok;
  int samples;
  int skipped;
  double worst_margin;
} gs_certify_report;

/* PSD and coefficient revalidation, system hash comparison, and a seeded
 * dominance spot-check against the oracle. reason may be NULL. */
GS_API gs_status gs_certify(const gs_certificate* c, const gs_system* s, uint64_t seed, int samples,
                            gs_certify_report* out, char* reason, size_t cap, size_t* needed);

/* ---- grid products (written to files) ---- */
/* res has ntheta entries. Bound function taken from the certificate. */
GS_API gs_status gs_sweep_write(const gs_system* s, const gs_certificate* c, const int* res, int nres,
                                const char* path, int* rows_written);
GS_API gs_status gs_levelset_write(const gs_system* s, const gs_certificate* c, const int* res, int nres,
                                   double level, const char* path, int* polylines);
GS_API gs_status gs_invariance_write(const gs_system* s, const int* res, int nres, double tol, const char* path,
                                     int* rows_written);
GS_API gs_status gs_gnuplot_write(const char* csv_path, int levelset, int ntheta, const char* path);

/* Effective worker count (hardware threads capped by GAINSCOPE_THREADS). */
GS_API int gs_thread_count(void);

#ifdef __cplusplus
}
#endif

#endif /* GAINSCOPE_H */
