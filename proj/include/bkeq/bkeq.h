/*
 * C interface to the bkeq library: Blanchard-Kahn classification and
 * enumeration of rational expectations equilibria q = -N k.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Functions return a bkeq_status; on failure the
 * thread-local message from bkeq_last_error() describes the problem.
 * Strings returned through char** are released with bkeq_string_free.
 */
#ifndef BKEQ_H
#define BKEQ_H

#include <stddef.h>

#if defined(_WIN32)
#if defined(BKEQ_BUILDING)
#define BKEQ_API __declspec(dllexport)
#else
#define BKEQ_API __declspec(dllimport)
#endif
#else
#define BKEQ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bkeq_status {
  BKEQ_OK = 0,
  BKEQ_ERR_INPUT = 1,    /* malformed document, shape or range violation */
  BKEQ_ERR_NUMERIC = 3,  /* eigen solver or chain construction failure */
  BKEQ_ERR_RANGE = 4,    /* index out of range */
  BKEQ_ERR_INTERNAL = 5
} bkeq_status;

typedef enum bkeq_format { BKEQ_FORMAT_TEXT = 0, BKEQ_FORMAT_JSON = 1 } bkeq_format;

typedef enum bkeq_boundary {
  BKEQ_BOUNDARY_REFUSE = 0,
  BKEQ_BOUNDARY_STABLE = 1,
  BKEQ_BOUNDARY_UNSTABLE = 2
} bkeq_boundary;

typedef enum bkeq_case {
  BKEQ_CASE_WITHHELD = -1, /* boundary eigenvalue without an override */
  BKEQ_CASE_NO_EQUILIBRIUM = 1,
  BKEQ_CASE_UNIQUE = 2,
  BKEQ_CASE_FINITE_MANY = 31,
  BKEQ_CASE_UNCOUNTABLE = 32
} bkeq_case;

/* Tolerance overrides: a value <= 0 keeps the model's setting. */
typedef struct bkeq_options {
  int allow_complex;
  bkeq_boundary boundary;
  double unit_margin;
  double cluster_tol;
  double rank_tol;
  double residual_tol;
} bkeq_options;

typedef struct bkeq_model bkeq_model;
typedef struct bkeq_analysis bkeq_analysis;

BKEQ_API const char* bkeq_version(void);
BKEQ_API const char* bkeq_last_error(void);
BKEQ_API void bkeq_string_free(char* s);
BKEQ_API void bkeq_options_init(bkeq_options* options);

BKEQ_API bkeq_status bkeq_model_from_json(const char* document, bkeq_model** out);
BKEQ_API bkeq_status bkeq_model_from_file(const char* path, bkeq_model** out);
BKEQ_API void bkeq_model_free(bkeq_model* model);
BKEQ_API int bkeq_model_n(const bkeq_model* model);
BKEQ_API int bkeq_model_m(const bkeq_model* model);

/* Runs eigendecomposition, enumeration, verification and classification. */
BKEQ_API bkeq_status bkeq_analyze(const bkeq_model* model, const bkeq_options* options,
                                  bkeq_analysis** out);
BKEQ_API void bkeq_analysis_free(bkeq_analysis* analysis);

BKEQ_API bkeq_case bkeq_analysis_case(const bkeq_analysis* analysis);
BKEQ_API int bkeq_analysis_boundary_blocked(const bkeq_analysis* analysis);
BKEQ_API size_t bkeq_analysis_equilibrium_count(const bkeq_analysis* analysis);

/* Copies the real part of N (m x n, row-major) into out, which must hold
 * m*n doubles. is_real reports whether N has zero imaginary part. */
BKEQ_API bkeq_status bkeq_analysis_equilibrium(const bkeq_analysis* analysis, size_t index,
                                               double* out, int* is_real);

/* include_equilibria = 0 renders the verdict and spectrum only. */
BKEQ_API bkeq_status bkeq_analysis_render(const bkeq_analysis* analysis, bkeq_format format,
                                          int include_equilibria, char** out);

/* Simulates the equilibrium with the given index from k0 (n entries). */
BKEQ_API bkeq_status bkeq_analysis_simulate(const bkeq_analysis* analysis, size_t index,
                                            const double* k0, size_t k0_len, int steps,
                                            bkeq_format format, char** out);

/* Checks an m x n feedback matrix given as a JSON array of arrays. passed is
 * set to 1 iff the scaled Riccati residual is within residual_tol. */
BKEQ_API bkeq_status bkeq_verify(const bkeq_model* model, const bkeq_options* options,
                                 const char* n_document, bkeq_format format, char** out,
                                 int* passed);

#ifdef __cplusplus
}
#endif

#endif /* BKEQ_H */
