/* C interface to the s4c workbench. Generated; do not edit. */

#ifndef S4C_H
#define S4C_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call. `OK` and `INVALID` are the two verdict-carrying
 * successes; the rest are failures.
 */
typedef enum s4c_status {
  /**
   * Success; for decision calls, the queried statement is valid.
   */
  S4C_OK = 0,
  /**
   * Semantic negative: invalid, refuted, or rejected.
   */
  S4C_INVALID = 1,
  /**
   * A resource cap was hit before an answer was found.
   */
  S4C_RESOURCE = 2,
  /**
   * Malformed input: unparsable text or out-of-range indices.
   */
  S4C_INPUT = 3,
  /**
   * A required pointer argument was NULL.
   */
  S4C_NULL_POINTER = 4,
  /**
   * A string argument was not valid UTF-8.
   */
  S4C_UTF8 = 5,
  /**
   * An index argument was out of range.
   */
  S4C_BOUNDS = 6,
  /**
   * The library panicked; state is unchanged but the call did nothing.
   */
  S4C_PANIC = 7,
} s4c_status;

/**
 * Opaque algebra handle.
 */
typedef struct s4c_algebra s4c_algebra;

/**
 * Opaque formula handle.
 */
typedef struct s4c_formula s4c_formula;

/**
 * Opaque model handle.
 */
typedef struct s4c_model s4c_model;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string; do not free.
 */
const char *s4c_version(void);

/**
 * Release a string returned by this library. NULL is a no-op.
 *
 * # Safety
 * `s` must have been returned by this library and not freed before.
 */
void s4c_string_free(char *s);

/**
 * Parse a formula over agents `0..agents`.
 *
 * # Safety
 * `text` must be NUL-terminated; `out` must be a valid pointer.
 */
enum s4c_status s4c_formula_parse(const char *text, uint8_t agents, struct s4c_formula **out);

/**
 * Render a formula with `E`/negation sugar folded back in.
 *
 * # Safety
 * `f` must be a live handle; `out` must be a valid pointer.
 */
enum s4c_status s4c_formula_render(const struct s4c_formula *f, uint8_t agents, char **out);

/**
 * Render a formula using only the primitive connectives.
 *
 * # Safety
 * `f` must be a live handle; `out` must be a valid pointer.
 */
enum s4c_status s4c_formula_render_primitive(const struct s4c_formula *f, char **out);

/**
 * Number of connectives and atoms in the formula tree.
 *
 * # Safety
 * `f` must be a live handle; `out` must be a valid pointer.
 */
enum s4c_status s4c_formula_size(const struct s4c_formula *f, uintptr_t *out);

/**
 * Release a formula handle. NULL is a no-op.
 *
 * # Safety
 * `f` must have come from this library and not be freed twice.
 */
void s4c_formula_free(struct s4c_formula *f);

/**
 * Parse a model file.
 *
 * # Safety
 * `text` must be NUL-terminated; `out` must be a valid pointer.
 */
enum s4c_status s4c_model_parse(const char *text, struct s4c_model **out);

/**
 * Serialize a model in the plain-text model format.
 *
 * # Safety
 * `m` must be a live handle; `out` must be a valid pointer.
 */
enum s4c_status s4c_model_write(const struct s4c_model *m, char **out);

/**
 * Check the frame laws. `S4C_OK` when every relation is a preorder and
 * the reachability cache is exact, `S4C_INVALID` otherwise.
 *
 * # Safety
 * `m` must be a live handle.
 */
enum s4c_status s4c_model_validate(const struct s4c_model *m);

/**
 * Number of worlds.
 *
 * # Safety
 * `m` must be a live handle; `out` must be a valid pointer.
 */
enum s4c_status s4c_model_world_count(const struct s4c_model *m, uintptr_t *out);

/**
 * Name of world `world`.
 *
 * # Safety
 * `m` must be a live handle; `out` must be a valid pointer.
 */
enum s4c_status s4c_model_world_name(const struct s4c_model *m, uintptr_t world, char **out);

/**
 * Does the formula hold at one world? Writes `true`/`false` to `out`.
 *
 * # Safety
 * `m` and `f` must be live handles; `out` must be a valid pointer.
 */
enum s4c_status s4c_model_satisfies(const struct s4c_model *m,
                                    uintptr_t world,
                                    const struct s4c_formula *f,
                                    bool *out);

/**
 * Does the formula hold at every world? Writes `true`/`false` to `out`.
 *
 * # Safety
 * `m` and `f` must be live handles; `out` must be a valid pointer.
 */
enum s4c_status s4c_model_globally_true(const struct s4c_model *m,
                                        const struct s4c_formula *f,
                                        bool *out);

/**
 * Release a model handle. NULL is a no-op.
 *
 * # Safety
 * `m` must have come from this library and not be freed twice.
 */
void s4c_model_free(struct s4c_model *m);

/**
 * Parse an algebra file.
 *
 * # Safety
 * `text` must be NUL-terminated; `out` must be a valid pointer.
 */
enum s4c_status s4c_algebra_parse(const char *text, struct s4c_algebra **out);

/**
 * Serialize an algebra in the plain-text algebra format.
 *
 * # Safety
 * `a` must be a live handle; `out` must be a valid pointer.
 */
enum s4c_status s4c_algebra_write(const struct s4c_algebra *a, char **out);

/**
 * Check the interior-operator laws. `S4C_OK` when all hold,
 * `S4C_INVALID` otherwise.
 *
 * # Safety
 * `a` must be a live handle.
 */
enum s4c_status s4c_algebra_validate(const struct s4c_algebra *a);

/**
 * Number of elements in the carrier.
 *
 * # Safety
 * `a` must be a live handle; `out` must be a valid pointer.
 */
enum s4c_status s4c_algebra_size(const struct s4c_algebra *a, uintptr_t *out);

/**
 * Is the algebra standard? Checks the graph-theoretic account and
 * writes `true`/`false` to `out`.
 *
 * # Safety
 * `a` must be a live handle; `out` must be a valid pointer.
 */
enum s4c_status s4c_algebra_standard(const struct s4c_algebra *a, bool *out);

/**
 * Release an algebra handle. NULL is a no-op.
 *
 * # Safety
 * `a` must have come from this library and not be freed twice.
 */
void s4c_algebra_free(struct s4c_algebra *a);

/**
 * Decide validity. `S4C_OK` means valid. `S4C_INVALID` means refuted:
 * when `countermodel` is non-NULL it receives a refuting model, and
 * `world` (also optional) the index of the refuting world in it.
 * Passing 0 for a cap keeps the built-in default.
 *
 * # Safety
 * `f` must be a live handle; `countermodel` and `world` may each be
 * NULL or valid pointers.
 */
enum s4c_status s4c_decide(const struct s4c_formula *f,
                           uint8_t agents,
                           uintptr_t cap_closure,
                           uintptr_t cap_sets,
                           struct s4c_model **countermodel,
                           uintptr_t *world);

/**
 * Decide whether globally-true premises `sigma` and locally-true
 * premises `gamma` force `f`. Verdict and countermodel conventions
 * follow [`s4c_decide`]; at a refuting world all of `gamma` holds and
 * `f` fails, while all of `sigma` holds everywhere.
 *
 * # Safety
 * `sigma`/`gamma` must point to `n_sigma`/`n_gamma` live handles (NULL
 * allowed when the count is 0); `f` must be a live handle.
 */
enum s4c_status s4c_consequence(const struct s4c_formula *const *sigma,
                                uintptr_t n_sigma,
                                const struct s4c_formula *const *gamma,
                                uintptr_t n_gamma,
                                const struct s4c_formula *f,
                                uint8_t agents,
                                uintptr_t cap_closure,
                                uintptr_t cap_sets,
                                struct s4c_model **countermodel,
                                uintptr_t *world);

/**
 * Check a proof certificate against assumptions. `S4C_OK` means the
 * certificate is accepted; `conclusion` (optional) then receives the
 * formula it proves, rendered primitively. A certificate that fails a
 * rule check yields `S4C_INVALID`; unparsable text yields `S4C_INPUT`.
 *
 * # Safety
 * `cert` must be NUL-terminated; `sigma` must point to `n_sigma` live
 * handles (NULL allowed when 0); `conclusion` may be NULL.
 */
enum s4c_status s4c_proof_check(const char *cert,
                                const struct s4c_formula *const *sigma,
                                uintptr_t n_sigma,
                                uint8_t agents,
                                char **conclusion);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* S4C_H */
