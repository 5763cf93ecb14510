#ifndef SPECTEIG_H
#define SPECTEIG_H

#include <stddef.h>
#include <stdint.h>

/**
 * Result of a call.
 */
typedef enum SpecteigStatus {
  SPECTEIG_STATUS_OK = 0,
  SPECTEIG_STATUS_NULL_POINTER = 1,
  SPECTEIG_STATUS_INVALID_ARGUMENT = 2,
  SPECTEIG_STATUS_PARSE = 3,
  SPECTEIG_STATUS_DIMENSION = 4,
  SPECTEIG_STATUS_DENOMINATOR = 5,
  SPECTEIG_STATUS_NO_CONVERGENCE = 6,
  SPECTEIG_STATUS_NUMERICAL = 7,
  SPECTEIG_STATUS_IO = 8,
  SPECTEIG_STATUS_PANIC = 9,
} SpecteigStatus;

/**
 * Right-hand operator of an eigenproblem.
 */
typedef enum SpecteigKind {
  SPECTEIG_KIND_Z = 0,
  SPECTEIG_KIND_H = 1,
  SPECTEIG_KIND_D = 2,
  SPECTEIG_KIND_B = 3,
} SpecteigKind;

/**
 * Polynomial model for the trust-region solver.
 */
typedef struct SpecteigPoly SpecteigPoly;

/**
 * Clustered multistart outcome.
 */
typedef struct SpecteigReport SpecteigReport;

/**
 * Symmetric tensor.
 */
typedef struct SpecteigTensor SpecteigTensor;

/**
 * Multistart eigen settings. Negative or NaN numeric fields select the
 * library default.
 */
typedef struct SpecteigEigenOptions {
  int64_t trials;
  uint64_t seed;
  double alpha;
  double gamma;
  double eps;
  double tol;
  double init_lo;
  double init_hi;
  int64_t max_inner;
  int64_t max_outer;
  /**
   * Nonzero for the largest eigenvalues.
   */
  uint8_t largest;
} SpecteigEigenOptions;

/**
 * Trust-region settings; same default convention as [`SpecteigEigenOptions`].
 */
typedef struct SpecteigTrOptions {
  double gamma;
  double alpha;
  double eps;
  double tol;
  int64_t max_inner;
  int64_t max_outer;
  int64_t starts;
  uint64_t seed;
  /**
   * Nonzero for `lambda = s^T grad T / delta^2`.
   */
  uint8_t flip_sign;
} SpecteigTrOptions;

typedef struct SpecteigTrSummary {
  double lambda;
  double value;
  double grad_norm;
  double proj_min_eig;
  uint64_t outer_iters;
  uint64_t inner_iters;
  uint8_t converged;
  uint8_t proj_pd;
} SpecteigTrSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call into the library from the same thread.
 */
const char *specteig_last_error(void);

/**
 * Library version as a static string.
 */
const char *specteig_version(void);

/**
 * Parses the plain-text tensor format.
 *
 * # Safety
 * `text` must be a nul-terminated string and `out` a valid pointer.
 */
enum SpecteigStatus specteig_tensor_parse(const char *text, struct SpecteigTensor **out);

/**
 * Reads a tensor file.
 *
 * # Safety
 * `path` must be a nul-terminated string and `out` a valid pointer.
 */
enum SpecteigStatus specteig_tensor_read(const char *path, struct SpecteigTensor **out);

/**
 * Builds a tensor from `count` entries; `indices` holds `count * order`
 * 1-based indices, one class representative per entry.
 *
 * # Safety
 * `indices` and `values` must point to arrays of the stated lengths.
 */
enum SpecteigStatus specteig_tensor_from_entries(size_t order,
                                                 size_t dim,
                                                 const size_t *indices,
                                                 const double *values,
                                                 size_t count,
                                                 struct SpecteigTensor **out);

/**
 * # Safety
 * `t` must come from this library and not be used afterwards.
 */
void specteig_tensor_free(struct SpecteigTensor *t);

/**
 * # Safety
 * `t` must be a valid handle or null (which yields 0).
 */
size_t specteig_tensor_order(const struct SpecteigTensor *t);

/**
 * # Safety
 * `t` must be a valid handle or null (which yields 0).
 */
size_t specteig_tensor_dim(const struct SpecteigTensor *t);

/**
 * `A x^m`.
 *
 * # Safety
 * `x` must hold `n` values and `out` be a valid pointer.
 */
enum SpecteigStatus specteig_tensor_apply(const struct SpecteigTensor *t,
                                          const double *x,
                                          size_t n,
                                          double *out);

/**
 * Defaults matching the fourth-order Z example: 100 trials, seed 2024,
 * `gamma = 1`, `alpha` from the Frobenius norm, starts in `[-1, 1)`.
 */
struct SpecteigEigenOptions specteig_eigen_options_default(void);

/**
 * Multistart solve for the extremal eigenpairs of `a`. `b` is required for
 * the D and B kinds and must be null otherwise; `options` may be null.
 *
 * # Safety
 * Handles must be valid or null as described; `out` must be a valid pointer.
 */
enum SpecteigStatus specteig_eigen_solve(const struct SpecteigTensor *a,
                                         enum SpecteigKind kind,
                                         const struct SpecteigTensor *b,
                                         const struct SpecteigEigenOptions *options,
                                         struct SpecteigReport **out);

/**
 * # Safety
 * `r` must be a valid handle or null (which yields 0).
 */
size_t specteig_report_pair_count(const struct SpecteigReport *r);

/**
 * # Safety
 * `r` must be a valid handle or null (which yields 0).
 */
size_t specteig_report_non_converged(const struct SpecteigReport *r);

/**
 * Copies pair `index`. `x` receives `n` entries and `n` must equal the
 * tensor dimension; any scalar output may be null.
 *
 * # Safety
 * `r` must be a valid handle and the output pointers valid or null.
 */
enum SpecteigStatus specteig_report_pair(const struct SpecteigReport *r,
                                         size_t index,
                                         double *lambda,
                                         double *x,
                                         size_t n,
                                         double *residual,
                                         double *occurrence);

/**
 * # Safety
 * `r` must come from this library and not be used afterwards.
 */
void specteig_report_free(struct SpecteigReport *r);

/**
 * Seeded random cubic `g = a randn`, `H = b symm(randn)`, `T = c symm(randn)`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SpecteigStatus specteig_poly_random_cubic(size_t n,
                                               double a,
                                               double b,
                                               double c,
                                               uint64_t seed,
                                               struct SpecteigPoly **out);

/**
 * Parses the JSON polynomial format.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a valid pointer.
 */
enum SpecteigStatus specteig_poly_parse_json(const char *json, struct SpecteigPoly **out);

/**
 * # Safety
 * `p` must be a valid handle or null (which yields 0).
 */
size_t specteig_poly_dim(const struct SpecteigPoly *p);

/**
 * `T_p(s)`.
 *
 * # Safety
 * `s` must hold `n` values and `out` be a valid pointer.
 */
enum SpecteigStatus specteig_poly_eval(const struct SpecteigPoly *p,
                                       const double *s,
                                       size_t n,
                                       double *out);

/**
 * # Safety
 * `p` must come from this library and not be used afterwards.
 */
void specteig_poly_free(struct SpecteigPoly *p);

/**
 * Defaults: `gamma = 8`, `alpha = 1`, `eps = 1e-9`, `tol = 1e-5`, one start.
 */
struct SpecteigTrOptions specteig_tr_options_default(void);

/**
 * Minimizes the model on `||s|| = delta`. `s` receives `n` entries, `n`
 * being the model dimension. Returns `NoConvergence` (with all outputs
 * filled) when the multiplier test was not met.
 *
 * # Safety
 * `p` must be a valid handle, `options` valid or null, `s` an array of `n`
 * values and `summary` valid or null.
 */
enum SpecteigStatus specteig_trust_region_solve(const struct SpecteigPoly *p,
                                                double delta,
                                                const struct SpecteigTrOptions *options,
                                                double *s,
                                                size_t n,
                                                struct SpecteigTrSummary *summary);

/**
 * `tau` and the rate exponent of the convergence estimate.
 *
 * # Safety
 * `tau` and `rate` must be valid pointers.
 */
enum SpecteigStatus specteig_kl_exponent(size_t d, size_t n, double *tau, double *rate);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPECTEIG_H */
