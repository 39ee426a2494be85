#ifndef CONDQUANT_H
#define CONDQUANT_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stddef.h>

// Result code of every `cq_*` call.
typedef enum CqStatus {
  CQ_STATUS_OK = 0,
  // A required pointer argument was null.
  CQ_STATUS_NULL_POINTER = 1,
  // Malformed input: bad probabilities, lengths, parameters or tags.
  CQ_STATUS_INVALID_ARGUMENT = 2,
  // A string argument was not valid UTF-8.
  CQ_STATUS_INVALID_UTF8 = 3,
  // The solver could not bracket or converge.
  CQ_STATUS_SOLVER_FAILURE = 4,
  // The output buffer is shorter than the number of outcomes.
  CQ_STATUS_BUFFER_TOO_SMALL = 5,
  // A Rust panic was caught at the boundary.
  CQ_STATUS_PANIC = 6,
} CqStatus;

// A risk measure: generalized quantile, shortfall, entropic, VaR or expectile.
typedef struct CqMeasure CqMeasure;

// A partition of the outcomes, standing for the information sigma-algebra.
typedef struct CqPartition CqPartition;

// A finite probability space.
typedef struct CqSpace CqSpace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or `""`. Valid until the next call.
const char *cq_last_error_message(void);

// Library version as a static string.
const char *cq_version(void);

// Creates a space from `n` strictly positive probabilities summing to 1 within 1e-12.
//
// # Safety
// `probs` must point to `n` doubles and `out` must be writable.
enum CqStatus cq_space_new(const double *probs, size_t n, struct CqSpace **out);

// Number of outcomes, or 0 for a null handle.
//
// # Safety
// `space` must be null or a live handle.
size_t cq_space_len(const struct CqSpace *space);

// # Safety
// `space` must be null or a handle not yet freed.
void cq_space_free(struct CqSpace *space);

// Creates a partition from one atom label per outcome; equal labels share an atom.
//
// # Safety
// `labels` must point to `n` values and `out` must be writable.
enum CqStatus cq_partition_new(const size_t *labels, size_t n, struct CqPartition **out);

// Number of atoms, or 0 for a null handle.
//
// # Safety
// `partition` must be null or a live handle.
size_t cq_partition_num_atoms(const struct CqPartition *partition);

// # Safety
// `partition` must be null or a handle not yet freed.
void cq_partition_free(struct CqPartition *partition);

// Generalized quantile with losses given as tags such as `"quadratic"`,
// `"power:1,1.5"` or `"exp:1,1"`.
//
// # Safety
// Both tags must be nul-terminated strings and `out` must be writable.
enum CqStatus cq_measure_quantile(double alpha,
                                  const char *u1,
                                  const char *u2,
                                  struct CqMeasure **out);

// Shortfall risk measure for a score given as a tag such as `"entropic:2"`.
//
// # Safety
// `score` must be a nul-terminated string and `out` must be writable.
enum CqStatus cq_measure_shortfall(const char *score, struct CqMeasure **out);

// Entropic risk measure; `gamma = INFINITY` gives the essential supremum.
//
// # Safety
// `out` must be writable.
enum CqStatus cq_measure_entropic(double gamma, struct CqMeasure **out);

// Value at risk at level `alpha`.
//
// # Safety
// `out` must be writable.
enum CqStatus cq_measure_var(double alpha, struct CqMeasure **out);

// Expectile at level `alpha`.
//
// # Safety
// `out` must be writable.
enum CqStatus cq_measure_expectile(double alpha, struct CqMeasure **out);

// # Safety
// `measure` must be null or a handle not yet freed.
void cq_measure_free(struct CqMeasure *measure);

// Conditional risk of `x` (one value per outcome) given `partition`, written
// per outcome into `out`, which must hold at least `out_len >= n` doubles.
//
// # Safety
// Handles must be live, `x` must point to `n` doubles and `out` to `out_len`.
enum CqStatus cq_conditional_risk(const struct CqSpace *space,
                                  const struct CqPartition *partition,
                                  const struct CqMeasure *measure,
                                  const double *x,
                                  size_t n,
                                  double *out,
                                  size_t out_len);

// Unconditional risk of the distribution putting weight `probs[i]` on `values[i]`.
//
// # Safety
// `values` and `probs` must point to `n` doubles and `out` must be writable.
enum CqStatus cq_static_risk(const struct CqMeasure *measure,
                             const double *values,
                             const double *probs,
                             size_t n,
                             double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONDQUANT_H */
