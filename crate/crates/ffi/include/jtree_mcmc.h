#ifndef JTREE_MCMC_H
#define JTREE_MCMC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum JmStatus {
  JM_STATUS_OK = 0,
  JM_STATUS_NULL_POINTER = 1,
  JM_STATUS_INVALID_ARGUMENT = 2,
  JM_STATUS_NOT_DECOMPOSABLE = 3,
  JM_STATUS_INVALID_GRAPH = 4,
  JM_STATUS_PARSE_ERROR = 5,
  JM_STATUS_INVALID_DATA = 6,
  JM_STATUS_OVERFLOW = 7,
  JM_STATUS_PANIC = 8,
} JmStatus;

typedef enum JmArity {
  JM_ARITY_SINGLE = 0,
  JM_ARITY_MULTI = 1,
} JmArity;

typedef enum JmRule {
  JM_RULE_STANDARD = 0,
  JM_RULE_TWO_STAGE = 1,
} JmRule;

// Undirected graph on vertices `0..v`.
typedef struct JmGraph JmGraph;

// Junction tree of a decomposable graph.
typedef struct JmJunctionTree JmJunctionTree;

// A running Markov chain with its random number generator.
typedef struct JmSampler JmSampler;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. The pointer is
// valid until the next call into this library on the same thread.
const char *jm_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *jm_version(void);

// Edgeless graph on `v` vertices.
//
// # Safety
// `out` must be valid for a pointer write.
enum JmStatus jm_graph_new(size_t v, struct JmGraph **out);

// Parses the edge-list text format (`v <count>` then `i j` lines).
//
// # Safety
// `text` must be a NUL-terminated string and `out` valid for a pointer write.
enum JmStatus jm_graph_parse(const char *text, struct JmGraph **out);

// # Safety
// `g` must come from this library and not be used afterwards; null is ignored.
void jm_graph_free(struct JmGraph *g);

// # Safety
// `g` must be a live graph handle.
enum JmStatus jm_graph_add_edge(struct JmGraph *g, size_t i, size_t j);

// # Safety
// `g` must be a live graph handle.
enum JmStatus jm_graph_remove_edge(struct JmGraph *g, size_t i, size_t j);

// False for null handles and out-of-range vertices.
//
// # Safety
// `g` must be null or a live graph handle.
bool jm_graph_has_edge(const struct JmGraph *g, size_t i, size_t j);

// Zero for a null handle.
//
// # Safety
// `g` must be null or a live graph handle.
size_t jm_graph_vertex_count(const struct JmGraph *g);

// Zero for a null handle.
//
// # Safety
// `g` must be null or a live graph handle.
size_t jm_graph_edge_count(const struct JmGraph *g);

// # Safety
// `g` must be null or a live graph handle.
bool jm_graph_is_decomposable(const struct JmGraph *g);

// # Safety
// `g` must be a live graph handle and `out` valid for a pointer write.
enum JmStatus jm_junction_tree_build(const struct JmGraph *g, struct JmJunctionTree **out);

// # Safety
// `j` must come from this library and not be used afterwards; null is ignored.
void jm_junction_tree_free(struct JmJunctionTree *j);

// # Safety
// `j` must be null or a live junction tree handle.
size_t jm_junction_tree_clique_count(const struct JmJunctionTree *j);

// Number of junction trees of the underlying graph; `Overflow` when it does
// not fit in 64 bits (use [`jm_junction_tree_log_count`] then).
//
// # Safety
// `j` must be a live junction tree handle and `out` valid for a write.
enum JmStatus jm_junction_tree_count(const struct JmJunctionTree *j, uint64_t *out);

// Natural log of the junction tree count.
//
// # Safety
// `j` must be a live junction tree handle and `out` valid for a write.
enum JmStatus jm_junction_tree_log_count(const struct JmJunctionTree *j, double *out);

// The graph a junction tree represents, as a new handle.
//
// # Safety
// `j` must be a live junction tree handle and `out` valid for a pointer write.
enum JmStatus jm_junction_tree_graph(const struct JmJunctionTree *j, struct JmGraph **out);

// Chain over junction trees starting at `start` whose graph marginal is
// uniform over junction trees (`mu_correction = false`) or over
// decomposable graphs (`mu_correction = true`).
//
// # Safety
// `start` must be a live graph handle and `out` valid for a pointer write.
enum JmStatus jm_sampler_new(const struct JmGraph *start,
                             uint64_t seed,
                             enum JmArity arity,
                             enum JmRule rule,
                             bool mu_correction,
                             struct JmSampler **out);

// Posterior chain for the intra-class Gaussian model on `data`, an `n × v`
// row-major array, starting from the edgeless graph with `σ² = 1`, `ρ = 0`
// and default priors.
//
// # Safety
// `data` must point to `n * v` readable doubles and `out` be valid for a
// pointer write.
enum JmStatus jm_sampler_new_ggim(const double *data,
                                  size_t n,
                                  size_t v,
                                  uint64_t seed,
                                  enum JmArity arity,
                                  enum JmRule rule,
                                  struct JmSampler **out);

// # Safety
// `s` must come from this library and not be used afterwards; null is ignored.
void jm_sampler_free(struct JmSampler *s);

// Sets how often (in sweeps) parameters are updated and the junction tree
// is redrawn. Both must be at least 1.
//
// # Safety
// `s` must be a live sampler handle.
enum JmStatus jm_sampler_set_cadence(struct JmSampler *s,
                                     uint64_t param_every,
                                     uint64_t randomize_every);

// Advances the chain by `sweeps` updates; `accepted` (may be null) receives
// how many of them were accepted.
//
// # Safety
// `s` must be a live sampler handle; `accepted` null or valid for a write.
enum JmStatus jm_sampler_run(struct JmSampler *s, uint64_t sweeps, uint64_t *accepted);

// Total sweeps run so far.
//
// # Safety
// `s` must be null or a live sampler handle.
uint64_t jm_sampler_sweeps(const struct JmSampler *s);

// Current untempered log score (log-likelihood plus log prior for the
// Gaussian model, zero for the flat target).
//
// # Safety
// `s` must be a live sampler handle and `out` valid for a write.
enum JmStatus jm_sampler_log_score(const struct JmSampler *s, double *out);

// Current `σ²` and `ρ` of the Gaussian model; `InvalidArgument` for the
// flat target.
//
// # Safety
// `s` must be a live sampler handle; `sigma2` and `rho` valid for writes.
enum JmStatus jm_sampler_parameters(const struct JmSampler *s, double *sigma2, double *rho);

// Snapshot of the current graph as a new handle.
//
// # Safety
// `s` must be a live sampler handle and `out` valid for a pointer write.
enum JmStatus jm_sampler_graph(const struct JmSampler *s, struct JmGraph **out);

// Snapshot of the current junction tree as a new handle.
//
// # Safety
// `s` must be a live sampler handle and `out` valid for a pointer write.
enum JmStatus jm_sampler_junction_tree(const struct JmSampler *s, struct JmJunctionTree **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JTREE_MCMC_H */
