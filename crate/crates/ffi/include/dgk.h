#ifndef DGK_H
#define DGK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum DgkStatus {
  DGK_STATUS_OK = 0,
  DGK_STATUS_NULL_POINTER = 1,
  DGK_STATUS_INVALID_UTF8 = 2,
  DGK_STATUS_PARSE = 3,
  DGK_STATUS_DISCONNECTED = 4,
  DGK_STATUS_INVALID_ARGUMENT = 5,
  DGK_STATUS_NUMERICAL = 6,
  DGK_STATUS_BUFFER_TOO_SMALL = 7,
  DGK_STATUS_PANIC = 8,
} DgkStatus;

typedef enum DgkFormat {
  DGK_FORMAT_EDGE_LIST = 0,
  DGK_FORMAT_DOT = 1,
} DgkFormat;

typedef enum DgkDangling {
  DGK_DANGLING_SELF_LOOP = 0,
  DGK_DANGLING_UNIFORM = 1,
} DgkDangling;

typedef enum DgkArithmetic {
  /**
   * Exact rationals up to 512 vertices, f64 above.
   */
  DGK_ARITHMETIC_AUTO = 0,
  DGK_ARITHMETIC_RATIONAL = 1,
  DGK_ARITHMETIC_FLOAT = 2,
} DgkArithmetic;

/**
 * A parsed, weakly connected weighted digraph.
 */
typedef struct DgkGraph DgkGraph;

/**
 * Right and left kernel bases of the random-walk Laplacian of a graph.
 */
typedef struct DgkKernels DgkKernels;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or null after a
 * successful call. Owned by the library and valid until the next call.
 */
const char *dgk_last_error(void);

/**
 * Parses a nul-terminated graph description into a new handle.
 *
 * # Safety
 * `text` must be a valid C string and `out` a valid pointer.
 */
enum DgkStatus dgk_graph_parse(const char *text, enum DgkFormat format, struct DgkGraph **out);

/**
 * Releases a graph handle. Null is accepted.
 *
 * # Safety
 * `g` must come from [`dgk_graph_parse`] and not be used afterwards.
 */
void dgk_graph_free(struct DgkGraph *g);

/**
 * Number of vertices, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t dgk_graph_vertex_count(const struct DgkGraph *g);

/**
 * JSON reach decomposition: vertices, reaches, cabals, exclusive and
 * common parts. Free the string with [`dgk_string_free`].
 *
 * # Safety
 * `g` must be a live handle and `out` a valid pointer.
 */
enum DgkStatus dgk_graph_reaches_json(const struct DgkGraph *g, char **out);

/**
 * Computes the kernel bases of `I − S` under the given dangling policy.
 *
 * # Safety
 * `g` must be a live handle and `out` a valid pointer.
 */
enum DgkStatus dgk_kernels_compute(const struct DgkGraph *g,
                                   enum DgkDangling dangling,
                                   enum DgkArithmetic arithmetic,
                                   struct DgkKernels **out);

/**
 * Releases a kernel handle. Null is accepted.
 *
 * # Safety
 * `k` must come from [`dgk_kernels_compute`] and not be used afterwards.
 */
void dgk_kernels_free(struct DgkKernels *k);

/**
 * Vertex count `n` and kernel dimension `k` (the number of reaches).
 *
 * # Safety
 * `k` must be a live handle; `n_out` and `k_out` valid pointers.
 */
enum DgkStatus dgk_kernels_dims(const struct DgkKernels *k, size_t *n_out, size_t *k_out);

/**
 * Right basis `Γ` as an `n × k` row-major matrix.
 *
 * # Safety
 * `buf` must hold at least `len` doubles.
 */
enum DgkStatus dgk_kernels_gamma(const struct DgkKernels *k, double *buf, size_t len);

/**
 * Left basis `Γ̄` as a `k × n` row-major matrix.
 *
 * # Safety
 * `buf` must hold at least `len` doubles.
 */
enum DgkStatus dgk_kernels_gamma_bar(const struct DgkKernels *k, double *buf, size_t len);

/**
 * Projection `Π = ΓΓ̄` as an `n × n` row-major matrix.
 *
 * # Safety
 * `buf` must hold at least `len` doubles.
 */
enum DgkStatus dgk_kernels_projection(const struct DgkKernels *k, double *buf, size_t len);

/**
 * Influence vector `(1ᵀ/n)Π` of length `n`.
 *
 * # Safety
 * `buf` must hold at least `len` doubles.
 */
enum DgkStatus dgk_kernels_influence(const struct DgkKernels *k, double *buf, size_t len);

/**
 * Kernel bases as JSON, with exact entries written as `"p/q"` strings.
 * Free the string with [`dgk_string_free`].
 *
 * # Safety
 * `k` must be a live handle and `out` a valid pointer.
 */
enum DgkStatus dgk_kernels_json(const struct DgkKernels *k, char **out);

/**
 * Pagerank `(α/n)1ᵀ(αI + 𝓛)⁻¹` with `α = 1/β − 1`, length `n`.
 *
 * # Safety
 * `g` must be a live handle and `buf` hold at least `len` doubles.
 */
enum DgkStatus dgk_pagerank(const struct DgkGraph *g,
                            double beta,
                            enum DgkDangling dangling,
                            double *buf,
                            size_t len);

/**
 * Heat kernel `e^{−𝓛t}` as an `n × n` row-major matrix.
 *
 * # Safety
 * `g` must be a live handle and `buf` hold at least `len` doubles.
 */
enum DgkStatus dgk_heat_kernel(const struct DgkGraph *g,
                               double t,
                               double tol,
                               enum DgkDangling dangling,
                               double *buf,
                               size_t len);

/**
 * Releases a string returned by this library. Null is accepted.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void dgk_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DGK_H */
