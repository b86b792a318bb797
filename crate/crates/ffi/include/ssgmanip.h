#ifndef SSGMANIP_H
#define SSGMANIP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdbool.h>
#include <stdint.h>

// Result codes shared by all fallible functions.
typedef enum SsgStatus {
  SSG_STATUS_OK = 0,
  SSG_STATUS_NULL_POINTER = 1,
  SSG_STATUS_INVALID_ARGUMENT = 2,
  SSG_STATUS_IO = 3,
  SSG_STATUS_INTERNAL = 4,
} SsgStatus;

// A game and its attacker type set.
typedef struct SsgInstance SsgInstance;

// Message for the last failed call on this thread, or NULL. Valid until the
// next call into this library from the same thread.
const char *ssg_last_error(void);

// Parses an instance from a NUL-terminated JSON document.
//
// # Safety
// `json` must be a valid C string and `out` a valid pointer.
enum SsgStatus ssg_instance_from_json(const char *json, struct SsgInstance **out);

// Loads an instance file.
//
// # Safety
// `path` must be a valid C string and `out` a valid pointer.
enum SsgStatus ssg_instance_load(const char *path, struct SsgInstance **out);

// Draws a random instance; defender payoffs come out non-negative.
//
// # Safety
// `out` must be a valid pointer.
enum SsgStatus ssg_instance_generate(size_t n,
                                     size_t m,
                                     size_t lambda,
                                     double rho,
                                     uint64_t seed,
                                     bool include_zero_sum,
                                     struct SsgInstance **out);

// Serializes an instance to JSON. Free the result with `ssg_string_free`.
//
// # Safety
// `inst` must come from this library and `out` be a valid pointer.
enum SsgStatus ssg_instance_to_json(const struct SsgInstance *inst, char **out);

// # Safety
// `inst` must be NULL or a handle from this library not yet freed.
void ssg_instance_free(struct SsgInstance *inst);

// # Safety
// `s` must be NULL or a string returned by this library not yet freed.
void ssg_string_free(char *s);

// Number of targets, or 0 for a NULL handle.
//
// # Safety
// `inst` must be NULL or a live handle.
size_t ssg_num_targets(const struct SsgInstance *inst);

// Number of attacker types, or 0 for a NULL handle.
//
// # Safety
// `inst` must be NULL or a live handle.
size_t ssg_num_types(const struct SsgInstance *inst);

// Number of defender resources, or 0 for a NULL handle.
//
// # Safety
// `inst` must be NULL or a live handle.
size_t ssg_num_resources(const struct SsgInstance *inst);

// Shifts the defender payoffs in place so the smallest is 0. The added
// constant is written to `offset` when non-NULL.
//
// # Safety
// `inst` must be a live handle; `offset` NULL or valid.
enum SsgStatus ssg_instance_shift(struct SsgInstance *inst, double *offset);

// SSE against type `type_index`. `coverage` receives n values.
//
// # Safety
// `inst` must be a live handle, `coverage` must hold n doubles, and the
// scalar outputs must be NULL or valid.
enum SsgStatus ssg_solve_sse(const struct SsgInstance *inst,
                             size_t type_index,
                             double *coverage,
                             size_t *target,
                             double *def_value,
                             double *atk_value);

// Maximin coverage and value of the defender.
//
// # Safety
// `inst` must be a live handle, `coverage` must hold n doubles, and the
// scalar outputs must be NULL or valid.
enum SsgStatus ssg_maximin(const struct SsgInstance *inst,
                           double *coverage,
                           double *value,
                           bool *fully_mixed);

// Optimal fake report of type `type_index`. The fake type's payoffs go to
// `fake_rewards`/`fake_penalties` and the induced coverage to `coverage`
// (n doubles each).
//
// # Safety
// `inst` must be a live handle, the three arrays must hold n doubles, and
// the scalar outputs must be NULL or valid.
enum SsgStatus ssg_optimal_report(const struct SsgInstance *inst,
                                  size_t type_index,
                                  double *fake_rewards,
                                  double *fake_penalties,
                                  double *coverage,
                                  size_t *target,
                                  double *atk_value,
                                  double *def_value);

// EoP of the policy that plays each reported type's SSE.
//
// # Safety
// `inst` must be a live handle and `eop` a valid pointer.
enum SsgStatus ssg_eop_sse(const struct SsgInstance *inst, double *eop);

// EoP of the quantal-response policy with precision `phi`.
//
// # Safety
// `inst` must be a live handle and `eop` a valid pointer.
enum SsgStatus ssg_eop_qr(const struct SsgInstance *inst, double phi, double *eop);

// Optimal policy by bisection to width `delta`. Writes the accepted
// threshold to `xi`, the policy's EoP to `eop`, and (when `policy_json` is
// non-NULL) the policy as JSON, to be freed with `ssg_string_free`.
//
// # Safety
// `inst` must be a live handle; the outputs must be NULL or valid.
enum SsgStatus ssg_optimal_policy(const struct SsgInstance *inst,
                                  double delta,
                                  double *xi,
                                  double *eop,
                                  char **policy_json);

#endif  /* SSGMANIP_H */
