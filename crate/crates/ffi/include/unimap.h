#ifndef UNIMAP_H
#define UNIMAP_H

/* Generated by cbindgen from crates/ffi/src; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum UnimapStatus {
  UNIMAP_STATUS_OK = 0,
  UNIMAP_STATUS_NULL_POINTER = 1,
  UNIMAP_STATUS_OUT_OF_RANGE = 2,
  UNIMAP_STATUS_PARITY = 3,
  UNIMAP_STATUS_CAP_EXCEEDED = 4,
  UNIMAP_STATUS_NO_MAPS = 5,
  UNIMAP_STATUS_BAD_CODE = 6,
  UNIMAP_STATUS_INVALID = 7,
  UNIMAP_STATUS_BUFFER_TOO_SMALL = 8,
  UNIMAP_STATUS_INTERNAL = 9,
  UNIMAP_STATUS_PANIC = 10,
} UnimapStatus;

/**
 * Underlying rooted graph of a sampled map.
 */
typedef struct UnimapGraph UnimapGraph;

/**
 * Sampler of uniform unicellular maps with its own random stream.
 */
typedef struct UnimapSampler UnimapSampler;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the message of the last failure on this thread.
 *
 * # Safety
 * `buf` must be null or valid for `cap` bytes; `out_len` must be valid.
 */
enum UnimapStatus unimap_last_error(char *buf, size_t cap, size_t *out_len);

/**
 * Library build identifier, a static NUL-terminated string.
 */
const char *unimap_version(void);

/**
 * Number of rooted unicellular maps with `n` edges and genus `g`, in decimal.
 *
 * # Safety
 * `buf` must be null or valid for `cap` bytes; `out_len` must be valid.
 */
enum UnimapStatus unimap_count(size_t n, size_t g, char *buf, size_t cap, size_t *out_len);

/**
 * `beta_theta`, the root of `(1 - b^2) atanh(b) / b = 1 - 2 theta`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum UnimapStatus unimap_solve_beta(double theta, double *out);

/**
 * Limit probability that the root has degree `d` when `g / n -> theta`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum UnimapStatus unimap_root_degree_limit_pmf(double theta, size_t d, double *out);

/**
 * Probability that the radius-`r` ball of the infinite limit tree is the
 * plane tree `code` of height `r`.
 *
 * # Safety
 * `code` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum UnimapStatus unimap_ball_probability(double xi, const char *code, double *out);

/**
 * Exhaustive census: `counts[g]` maps of genus `g` with `n` edges,
 * `*out_len = n / 2 + 1` entries.
 *
 * # Safety
 * `counts` must be null or valid for `cap` writes; `out_len` must be valid.
 */
enum UnimapStatus unimap_census(size_t n, uint64_t *counts, size_t cap, size_t *out_len);

/**
 * New sampler of maps with `n` edges and genus `g`, seeded with `seed`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum UnimapStatus unimap_sampler_new(size_t n, size_t g, uint64_t seed, struct UnimapSampler **out);

/**
 * # Safety
 * `sampler` must be null or come from [`unimap_sampler_new`], freed once.
 */
void unimap_sampler_free(struct UnimapSampler *sampler);

/**
 * Draws the next map; the graph handle belongs to the caller.
 *
 * # Safety
 * `sampler` must be a live handle; `out` must be valid for writes.
 */
enum UnimapStatus unimap_sampler_next(struct UnimapSampler *sampler, struct UnimapGraph **out);

/**
 * # Safety
 * `graph` must be null or come from [`unimap_sampler_next`], freed once.
 */
void unimap_graph_free(struct UnimapGraph *graph);

/**
 * Vertex count, edge count and root degree (loops count twice).
 *
 * # Safety
 * `graph` must be a live handle; the out pointers must be valid.
 */
enum UnimapStatus unimap_graph_stats(const struct UnimapGraph *graph,
                                     size_t *vertices,
                                     size_t *edges,
                                     size_t *root_degree);

/**
 * Edge endpoints as `2 * edges` entries `a0, b0, a1, b1, ...`.
 *
 * # Safety
 * `ends` must be null or valid for `cap` writes; `out_len` must be valid.
 */
enum UnimapStatus unimap_graph_edges(const struct UnimapGraph *graph,
                                     size_t *ends,
                                     size_t cap,
                                     size_t *out_len);

/**
 * Unordered shape code of the radius-`r` ball, or `UNIMAP_STATUS_INVALID`
 * when the ball is not a tree.
 *
 * # Safety
 * `graph` must be a live handle; `buf` null or valid for `cap` bytes;
 * `out_len` valid.
 */
enum UnimapStatus unimap_graph_ball_code(const struct UnimapGraph *graph,
                                         size_t r,
                                         char *buf,
                                         size_t cap,
                                         size_t *out_len);

/**
 * The graph as JSON: `{"v":..,"edges":[[a,b],..],"root_vertex":..,"root_edge":..}`.
 *
 * # Safety
 * `graph` must be a live handle; `buf` null or valid for `cap` bytes;
 * `out_len` valid.
 */
enum UnimapStatus unimap_graph_to_json(const struct UnimapGraph *graph,
                                       char *buf,
                                       size_t cap,
                                       size_t *out_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UNIMAP_H */
