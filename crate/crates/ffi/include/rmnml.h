#ifndef RMNML_H
#define RMNML_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum RmnmlStatus {
  RMNML_STATUS_OK = 0,
  RMNML_STATUS_NULL_POINTER = 1,
  RMNML_STATUS_INVALID_ARGUMENT = 2,
  RMNML_STATUS_DIMENSION_MISMATCH = 3,
  RMNML_STATUS_OFF_MANIFOLD = 4,
  RMNML_STATUS_NOT_TANGENT = 5,
  RMNML_STATUS_QUADRATURE = 6,
  RMNML_STATUS_NO_CONVERGENCE = 7,
  RMNML_STATUS_UNSUPPORTED_DIMENSION = 8,
  RMNML_STATUS_PANIC = 9,
} RmnmlStatus;

/**
 * Coordinate chart for [`rmnml_chart_gap`].
 */
typedef enum RmnmlChart {
  RMNML_CHART_LORENTZ_GRAPH = 0,
  RMNML_CHART_POINCARE = 1,
} RmnmlChart;

/**
 * Opaque dataset handle.
 */
typedef struct RmnmlDataset RmnmlDataset;

/**
 * Parameter domain: mean in the geodesic ball of `radius` about the origin,
 * scale in `[sigma_min, sigma_max]`.
 */
typedef struct RmnmlDomain {
  double radius;
  double sigma_min;
  double sigma_max;
} RmnmlDomain;

typedef struct RmnmlPcResult {
  size_t k;
  size_t n;
  double term_kn;
  double term_volume;
  double term_fisher;
  double total_log_pc;
} RmnmlPcResult;

typedef struct RmnmlCodeLength {
  double neg_max_loglik;
  double log_pc;
  double total;
  double sigma_hat;
  bool boundary_flag;
} RmnmlCodeLength;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *rmnml_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *rmnml_version(void);

/**
 * Default domain: radius 3, sigma in [0.1, 3].
 */
struct RmnmlDomain rmnml_domain_default(void);

/**
 * Normaliser `xi(sigma)` of the Gaussian on `H^dim`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum RmnmlStatus rmnml_xi(size_t dim, double sigma, double *out_value);

/**
 * `xi'(sigma)` and `xi''(sigma)`.
 *
 * # Safety
 * Both out-pointers must be null or valid for writes.
 */
enum RmnmlStatus rmnml_xi_derivatives(size_t dim, double sigma, double *out_d1, double *out_d2);

/**
 * Closed-form Fisher information: the scalar multiplying the identity in the
 * mean block, and the scale entry.
 *
 * # Safety
 * Both out-pointers must be null or valid for writes.
 */
enum RmnmlStatus rmnml_fisher_closed(size_t dim,
                                     double sigma,
                                     double *out_mu_scalar,
                                     double *out_sigma_entry);

/**
 * Volume of a geodesic ball of `radius` in `H^dim`.
 *
 * # Safety
 * `out_value` must be null or valid for writes.
 */
enum RmnmlStatus rmnml_ball_volume(size_t dim, double radius, double *out_value);

/**
 * Log parametric complexity of the Gaussian on `H^dim` with `n` samples.
 *
 * # Safety
 * `dom` must be null or point to a valid domain; `out_result` must be null
 * or valid for writes.
 */
enum RmnmlStatus rmnml_pc_hgd(size_t dim,
                              size_t n,
                              const struct RmnmlDomain *dom,
                              struct RmnmlPcResult *out_result);

/**
 * Builds a dataset from `n` points of `H^dim`, given row-major as `n`
 * rows of `dim + 1` Lorentz coordinates.
 *
 * # Safety
 * `coords` must point to `n * (dim + 1)` readable doubles; `out_dataset`
 * must be null or valid for writes.
 */
enum RmnmlStatus rmnml_dataset_from_lorentz(const double *coords,
                                            size_t n,
                                            size_t dim,
                                            struct RmnmlDataset **out_dataset);

/**
 * Reads a dataset JSON file.
 *
 * # Safety
 * `path` must be null or a NUL-terminated string; `out_dataset` must be null
 * or valid for writes.
 */
enum RmnmlStatus rmnml_dataset_from_file(const char *path, struct RmnmlDataset **out_dataset);

/**
 * Draws `n` points from the Gaussian with mean at spatial coordinates
 * `mu_spatial` (`dim` values; null for the origin) and scale `sigma`.
 *
 * # Safety
 * `mu_spatial` must be null or point to `dim` readable doubles;
 * `out_dataset` must be null or valid for writes.
 */
enum RmnmlStatus rmnml_sample(size_t dim,
                              size_t n,
                              const double *mu_spatial,
                              double sigma,
                              uint64_t seed,
                              struct RmnmlDataset **out_dataset);

/**
 * Releases a dataset. Null is ignored.
 *
 * # Safety
 * `ds` must be null or a handle from this library not yet freed.
 */
void rmnml_dataset_free(struct RmnmlDataset *ds);

/**
 * Number of points; 0 for a null handle.
 *
 * # Safety
 * `ds` must be null or a live handle.
 */
size_t rmnml_dataset_len(const struct RmnmlDataset *ds);

/**
 * Dimension `D`; 0 for a null handle.
 *
 * # Safety
 * `ds` must be null or a live handle.
 */
size_t rmnml_dataset_dim(const struct RmnmlDataset *ds);

/**
 * Copies the Lorentz coordinates, row-major, into `buf`, which must hold
 * `len * (dim + 1)` doubles; `buf_len` is its capacity in doubles.
 *
 * # Safety
 * `ds` must be null or a live handle; `buf` must be null or valid for
 * `buf_len` writes.
 */
enum RmnmlStatus rmnml_dataset_coords(const struct RmnmlDataset *ds, double *buf, size_t buf_len);

/**
 * Rm-NML code-length of a dataset, in nats.
 *
 * # Safety
 * `ds` must be null or a live handle, `dom` null or valid, `out_report`
 * null or valid for writes.
 */
enum RmnmlStatus rmnml_codelength(const struct RmnmlDataset *ds,
                                  const struct RmnmlDomain *dom,
                                  struct RmnmlCodeLength *out_report);

/**
 * Difference between the conventional NML code-length in `chart` and the
 * Rm-NML code-length, `-sum_i log sqrt(det g(x_i))`.
 *
 * # Safety
 * `ds` must be null or a live handle; `out_value` null or valid for writes.
 */
enum RmnmlStatus rmnml_chart_gap(const struct RmnmlDataset *ds,
                                 enum RmnmlChart chart,
                                 double *out_value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RMNML_H */
