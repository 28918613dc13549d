/* C interface to the rcop library: permutation-invariant Gaussian models,
 * block decompositions of their colored spaces, cone integrals and Bayesian
 * model selection.
 *
 * Conventions
 *   - Every fallible call returns rcop_status; RCOP_OK is zero. The message of
 *     the most recent failure on the calling thread is rcop_last_error().
 *   - Matrices are dense row-major double arrays; a p x p matrix has p*p
 *     entries.
 *   - Strings are returned through (buf, cap, needed): `needed` receives the
 *     length including the terminator, and the string is copied only when
 *     cap >= needed. Pass buf = NULL to query the size.
 *   - Objects are opaque and released with their matching *_free function,
 *     which accepts NULL.
 */
#ifndef RCOP_H
#define RCOP_H

#include <stddef.h>
#include <stdint.h>

#if defined(RCOP_BUILDING)
#define RCOP_API __attribute__((visibility("default")))
#else
#define RCOP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rcop_status {
  RCOP_OK = 0,
  RCOP_E_PARSE = 1,
  RCOP_E_INVALID_ARGUMENT = 2,
  RCOP_E_DOMAIN = 3,
  RCOP_E_NUMERIC = 4,
  RCOP_E_DECOMPOSITION = 5,
  RCOP_E_CAP_EXCEEDED = 6,
  RCOP_E_IO = 7,
  RCOP_E_INTERNAL = 8
} rcop_status;

typedef enum rcop_catalog { RCOP_CATALOG_P4_ALL22 = 0, RCOP_CATALOG_CYCLIC = 1 } rcop_catalog;
typedef enum rcop_algorithm { RCOP_ALGORITHM_CYCLIC = 0, RCOP_ALGORITHM_SYM = 1 } rcop_algorithm;

typedef struct rcop_group rcop_group;
typedef struct rcop_decomposition rcop_decomposition;
typedef struct rcop_dataset rcop_dataset;
typedef struct rcop_evaluator rcop_evaluator;
typedef struct rcop_table rcop_table;
typedef struct rcop_chain rcop_chain;

RCOP_API const char* rcop_version(void);
RCOP_API const char* rcop_last_error(void);
RCOP_API const char* rcop_status_name(rcop_status status);

/* ---- groups ---------------------------------------------------------- */

/* Generators in 1-based cycle notation separated by ',' or ';' between
 * parenthesised cycles, e.g. "(1,2,3,4),(1,3)". "" or "()" is the trivial group. */
RCOP_API rcop_status rcop_group_parse(const char* text, int p, rcop_group** out);
RCOP_API void rcop_group_free(rcop_group* g);
RCOP_API int rcop_group_p(const rcop_group* g);
RCOP_API int rcop_group_generator_count(const rcop_group* g);
RCOP_API rcop_status rcop_group_to_string(const rcop_group* g, char* buf, size_t cap, size_t* needed);
/* Canonical (lexicographically minimal) generator of the cyclic group <s>, and
 * the number of its generators. */
RCOP_API rcop_status rcop_cyclic_canonical(const char* cycle_text, int p, char* buf, size_t cap, size_t* needed,
                                           uint64_t* generator_count);
RCOP_API rcop_status rcop_count_cyclic_subgroups(int p, uint64_t* out);

/* Orbit class id of every cell (vertex classes first), p*p ints. */
RCOP_API rcop_status rcop_coloring_grid(const rcop_group* g, int* out);
RCOP_API rcop_status rcop_colored_dimension(const rcop_group* g, int* out);
RCOP_API rcop_status rcop_project(const rcop_group* g, const double* x, double* out);
RCOP_API rcop_status rcop_is_member(const rcop_group* g, const double* x, double tol, int* out);
RCOP_API rcop_status rcop_ari(const rcop_group* a, const rcop_group* b, double* out);

/* ---- decompositions -------------------------------------------------- */

RCOP_API rcop_status rcop_decompose(const rcop_group* g, uint64_t seed, rcop_decomposition** out);
RCOP_API void rcop_decomposition_free(rcop_decomposition* d);
RCOP_API int rcop_decomposition_p(const rcop_decomposition* d);
RCOP_API int rcop_decomposition_block_count(const rcop_decomposition* d);
RCOP_API rcop_status rcop_decomposition_block(const rcop_decomposition* d, int index, int* r, int* dim_field, int* k,
                                              int* col_begin);
/* Orthogonal p x p basis, row-major. */
RCOP_API rcop_status rcop_decomposition_basis(const rcop_decomposition* d, double* out);
RCOP_API rcop_status rcop_decomposition_structure(const rcop_decomposition* d, char* buf, size_t cap, size_t* needed);
RCOP_API rcop_status rcop_decomposition_json(const rcop_decomposition* d, char* buf, size_t cap, size_t* needed);
RCOP_API rcop_status rcop_cone_constants(const rcop_decomposition* d, double* A, double* B, int* n0);

/* ---- cone integrals (natural log) ------------------------------------ */

RCOP_API rcop_status rcop_log_gamma_omega(int r, int d, double lambda, double* out);
RCOP_API rcop_status rcop_log_gamma_P(const rcop_decomposition* d, double lambda, double* out);
RCOP_API rcop_status rcop_log_I(const rcop_decomposition* d, double delta, const double* D, double* out);
RCOP_API rcop_status rcop_log_phi(const rcop_decomposition* d, const double* x, double* out);
RCOP_API rcop_status rcop_log_det(const rcop_decomposition* d, const double* x, double* out);

/* ---- data and Wishart laws ------------------------------------------- */

RCOP_API rcop_status rcop_dataset_from_samples(const double* rows, int n, int p, rcop_dataset** out);
RCOP_API rcop_status rcop_dataset_from_scatter(const double* scatter, int p, int n, rcop_dataset** out);
RCOP_API rcop_status rcop_dataset_read_samples(const char* path, rcop_dataset** out);
RCOP_API rcop_status rcop_dataset_read_scatter(const char* path, int n, rcop_dataset** out);
RCOP_API rcop_status rcop_dataset_frets(rcop_dataset** out);
/* n draws of N_p(0, Sigma) from the stream keyed by seed. */
RCOP_API rcop_status rcop_dataset_gaussian(const double* sigma, int p, int n, uint64_t seed, rcop_dataset** out);
RCOP_API void rcop_dataset_free(rcop_dataset* ds);
RCOP_API int rcop_dataset_p(const rcop_dataset* ds);
RCOP_API int rcop_dataset_n(const rcop_dataset* ds);
RCOP_API int rcop_dataset_has_samples(const rcop_dataset* ds);
RCOP_API rcop_status rcop_dataset_scatter(const rcop_dataset* ds, double* out);
RCOP_API rcop_status rcop_dataset_samples(const rcop_dataset* ds, double* out);

RCOP_API rcop_status rcop_circulant_sigma(int p, double* out);
RCOP_API rcop_status rcop_mle(const rcop_decomposition* d, const rcop_dataset* ds, double* out);
RCOP_API rcop_status rcop_wishart_log_pdf(const rcop_decomposition* d, double eta, const double* sigma,
                                          const double* x, double* out);
RCOP_API rcop_status rcop_wishart_sample(const rcop_group* g, int n, const double* sigma, uint64_t seed,
                                         uint64_t index, double* out);

/* ---- model selection ------------------------------------------------- */

/* Posterior evaluator for prior shape delta, prior matrix D and the data. */
RCOP_API rcop_status rcop_evaluator_new(const rcop_dataset* ds, double delta, const double* D, rcop_evaluator** out);
RCOP_API void rcop_evaluator_free(rcop_evaluator* ev);
RCOP_API rcop_status rcop_log_posterior(rcop_evaluator* ev, const rcop_group* g, double* out);

RCOP_API rcop_status rcop_select_exact(rcop_evaluator* ev, rcop_catalog catalog, rcop_table** out);
/* One chain; `chain` selects an independent random stream for the same seed.
 * `start` is cycle notation for the initial permutation ("" = identity).
 * Safe to call concurrently on the same evaluator. */
RCOP_API rcop_status rcop_mh_run(rcop_evaluator* ev, rcop_algorithm algorithm, long steps, const char* start,
                                 uint64_t seed, uint64_t chain, rcop_chain** out);
RCOP_API void rcop_chain_free(rcop_chain* c);
RCOP_API long rcop_chain_length(const rcop_chain* c);
RCOP_API double rcop_chain_acceptance_rate(const rcop_chain* c);
RCOP_API double rcop_chain_effective_steps(const rcop_chain* c);
RCOP_API rcop_status rcop_chain_write_trace(const rcop_chain* c, const char* path);
RCOP_API rcop_status rcop_chain_estimate(const rcop_chain* c, long burn_in, rcop_table** out);

RCOP_API void rcop_table_free(rcop_table* t);
RCOP_API int rcop_table_size(const rcop_table* t);
RCOP_API rcop_status rcop_table_row(const rcop_table* t, int index, char* label, size_t cap, size_t* needed,
                                    double* log_post, double* probability);
RCOP_API rcop_status rcop_table_row_group(const rcop_table* t, int index, char* buf, size_t cap, size_t* needed);
RCOP_API rcop_status rcop_table_set_metadata(rcop_table* t, const char* D_spec, uint64_t seed);
RCOP_API rcop_status rcop_table_json(const rcop_table* t, char* buf, size_t cap, size_t* needed);

/* ---- files ----------------------------------------------------------- */

/* Reads a numeric grid. Dimensions are always reported; values are copied
 * when cap >= rows*cols. */
RCOP_API rcop_status rcop_matrix_read(const char* path, double* out, size_t cap, int* rows, int* cols);
RCOP_API rcop_status rcop_matrix_write(const char* path, const double* m, int rows, int cols);
RCOP_API rcop_status rcop_matrix_write_pgm(const char* path, const double* m, int rows, int cols);
RCOP_API rcop_status rcop_write_text(const char* path, const char* text);

#ifdef __cplusplus
}
#endif

#endif /* RCOP_H */
