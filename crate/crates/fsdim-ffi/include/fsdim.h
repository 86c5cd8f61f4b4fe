#ifndef FSDIM_H
#define FSDIM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define FSDIM_OK 0

#define FSDIM_ERR_ARGUMENT 2

#define FSDIM_ERR_INPUT 3

#define FSDIM_ERR_MACHINE 4

#define FSDIM_ERR_BUDGET 5

#define FSDIM_ERR_IO 6

#define FSDIM_ERR_POINTER 7

/**
 * Verdicts returned by `fsdim_machine_check_il`.
 */
#define FSDIM_IL_VERIFIED 1

#define FSDIM_IL_COLLISION 0

#define FSDIM_IL_INCONCLUSIVE -1

/**
 * Opaque machine handle.
 */
typedef struct FsdimMachine FsdimMachine;

/**
 * Opaque symbol-string handle.
 */
typedef struct FsdimString FsdimString;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message for this thread; valid until the next failing
 * call. Never null.
 */
const char *fsdim_last_error(void);

/**
 * Parses a digit string (symbols '0'..'9') over an alphabet of size
 * `k` into a new handle. On success stores the handle in `out`.
 *
 * # Safety
 * `digits` must be a valid NUL-terminated string and `out` a valid
 * pointer.
 */
int32_t fsdim_string_from_digits(uintptr_t k, const char *digits, struct FsdimString **out);

/**
 * Frees a string handle. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void fsdim_string_free(struct FsdimString *s);

/**
 * Length of the string behind the handle.
 *
 * # Safety
 * `s` must be a valid handle.
 */
uintptr_t fsdim_string_len(const struct FsdimString *s);

/**
 * Normalized block entropy rate H(pi^(l)) / (l log k) of the full
 * string at one block length.
 *
 * # Safety
 * `s` and `out` must be valid pointers.
 */
int32_t fsdim_entropy_rate(const struct FsdimString *s, uintptr_t l, double *out);

/**
 * Finite-state dimension estimate with default grid parameters; stores
 * the tail-window lower and upper values.
 *
 * # Safety
 * All pointers must be valid.
 */
int32_t fsdim_estimate_dim(const struct FsdimString *s,
                           uintptr_t l_max,
                           double *lower,
                           double *upper);

/**
 * Finite-state mutual dimension estimate of two equal-length strings.
 *
 * # Safety
 * All pointers must be valid.
 */
int32_t fsdim_estimate_mdim(const struct FsdimString *s,
                            const struct FsdimString *t,
                            uintptr_t l_max,
                            double *lower,
                            double *upper);

/**
 * Loads a machine from its JSON document.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` a valid
 * pointer.
 */
int32_t fsdim_machine_from_json(const char *json, struct FsdimMachine **out);

/**
 * Frees a machine handle. Null is ignored.
 *
 * # Safety
 * `m` must come from this library and not be freed twice.
 */
void fsdim_machine_free(struct FsdimMachine *m);

/**
 * Number of states of the machine.
 *
 * # Safety
 * `m` must be a valid handle.
 */
uintptr_t fsdim_machine_states(const struct FsdimMachine *m);

/**
 * Total output bits of the machine on the string.
 *
 * # Safety
 * All pointers must be valid.
 */
int32_t fsdim_machine_run_len(const struct FsdimMachine *m,
                              const struct FsdimString *s,
                              uint64_t *out);

/**
 * Information-losslessness check; stores FSDIM_IL_VERIFIED,
 * FSDIM_IL_COLLISION, or FSDIM_IL_INCONCLUSIVE in `verdict`.
 *
 * # Safety
 * All pointers must be valid.
 */
int32_t fsdim_machine_check_il(const struct FsdimMachine *m, uint64_t budget, int32_t *verdict);

/**
 * Audits the generalized Kraft inequality at word length `r`; stores 1
 * in `holds` when the inequality is satisfied, 0 otherwise.
 *
 * # Safety
 * All pointers must be valid.
 */
int32_t fsdim_machine_kraft_holds(const struct FsdimMachine *m,
                                  uintptr_t r,
                                  uint64_t budget,
                                  int32_t *holds);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* FSDIM_H */
