#ifndef HADAMARD_ISING_H
#define HADAMARD_ISING_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Problem family selector for [`hi_model_build`].
 */
#define HI_PROBLEM_HSEARCH 0

#define HI_PROBLEM_ORTHOSET 1

#define HI_PROBLEM_COMPLETION 2

#define HI_SCHEDULE_GEOMETRIC 0

#define HI_SCHEDULE_LINEAR 1

/**
 * Result code of every fallible call.
 */
typedef enum HiStatus {
  HI_STATUS_OK = 0,
  HI_STATUS_NULL_POINTER = 1,
  HI_STATUS_INVALID_ARGUMENT = 2,
  HI_STATUS_PARSE_ERROR = 3,
  HI_STATUS_BUFFER_TOO_SMALL = 4,
  HI_STATUS_PANIC = 99,
} HiStatus;

/**
 * Opaque Ising model.
 */
typedef struct HiModel HiModel;

/**
 * Opaque annealing result set.
 */
typedef struct HiResults HiResults;

/**
 * Sampler settings. `beta_min == beta_max == 0` selects the range derived
 * from the model's coefficients.
 */
typedef struct HiAnnealConfig {
  uint64_t sweeps;
  uint64_t reads;
  double beta_min;
  double beta_max;
  /**
   * `HI_SCHEDULE_GEOMETRIC` or `HI_SCHEDULE_LINEAR`.
   */
  uint32_t schedule;
  uint64_t seed;
  /**
   * Nonzero visits spins in random order each sweep.
   */
  uint8_t random_order;
} HiAnnealConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *hi_last_error_message(void);

/**
 * Default sampler settings: 1000 sweeps, 10 reads, geometric beta 0.1..10.
 */
struct HiAnnealConfig hi_anneal_config_default(void);

/**
 * Builds the unnormalized quadratic model of a problem instance.
 *
 * `count` is the number of vectors for orthogonal sets and is ignored
 * otherwise. For completions `known` holds `known_len` entries (+1/-1),
 * the known columns one after another, each of length `order`.
 * `delta == 0` selects the family's default penalty weight.
 *
 * # Safety
 * `known` must point to `known_len` readable bytes (or be null with
 * `known_len == 0`); `out` must be a valid pointer.
 */
enum HiStatus hi_model_build(uint32_t problem,
                             size_t order,
                             size_t count,
                             const int8_t *known,
                             size_t known_len,
                             uint64_t delta,
                             struct HiModel **out);

/**
 * Parses a model document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum HiStatus hi_model_from_json(const char *json, struct HiModel **out);

/**
 * Serializes a model; release the string with [`hi_string_free`].
 *
 * # Safety
 * `model` must come from this library; `out` must be a valid pointer.
 */
enum HiStatus hi_model_to_json(const struct HiModel *model, char **out);

/**
 * Number of spin variables, or 0 for a null handle.
 *
 * # Safety
 * `model` must be null or come from this library.
 */
size_t hi_model_num_vars(const struct HiModel *model);

/**
 * New model divided by its largest coefficient magnitude.
 *
 * # Safety
 * `model` must come from this library; `out` must be a valid pointer.
 */
enum HiStatus hi_model_normalize(const struct HiModel *model, struct HiModel **out);

/**
 * Offset-excluded energy of `spins` (entries +1/-1).
 *
 * # Safety
 * `spins` must point to `len` readable bytes; `out` must be valid.
 */
enum HiStatus hi_model_energy(const struct HiModel *model,
                              const int8_t *spins,
                              size_t len,
                              double *out);

/**
 * Anneals `model`; release the result with [`hi_results_free`].
 *
 * # Safety
 * All pointers must be valid; `model` must come from this library.
 */
enum HiStatus hi_anneal(const struct HiModel *model,
                        const struct HiAnnealConfig *config,
                        struct HiResults **out);

/**
 * Number of distinct samples, or 0 for a null handle.
 *
 * # Safety
 * `results` must be null or come from this library.
 */
size_t hi_results_len(const struct HiResults *results);

/**
 * Copies sample `index` (samples are sorted by energy). `spins_out` must
 * hold at least the model's variable count; any of `energy` and
 * `occurrences` may be null.
 *
 * # Safety
 * `spins_out` must point to `spins_cap` writable bytes.
 */
enum HiStatus hi_results_sample(const struct HiResults *results,
                                size_t index,
                                int8_t *spins_out,
                                size_t spins_cap,
                                double *energy,
                                uint64_t *occurrences);

/**
 * Decodes `spins` with the model's layout and reports whether the result
 * is a Hadamard matrix, orthogonal set or valid completion.
 *
 * # Safety
 * `spins` must point to `len` readable bytes; `ok` must be valid.
 */
enum HiStatus hi_verify_sample(const struct HiModel *model,
                               const int8_t *spins,
                               size_t len,
                               bool *ok);

/**
 * # Safety
 * `model` must be null or come from this library, and not be used after.
 */
void hi_model_free(struct HiModel *model);

/**
 * # Safety
 * `results` must be null or come from this library, and not be used after.
 */
void hi_results_free(struct HiResults *results);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void hi_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HADAMARD_ISING_H */
