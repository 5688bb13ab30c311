#ifndef STABLECUT_H
#define STABLECUT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every call.
typedef enum ScStatus {
  SC_STATUS_OK = 0,
  // A required pointer argument was null.
  SC_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8.
  SC_STATUS_INVALID_UTF8 = 2,
  // JSON was malformed or did not describe a valid instance or certificate.
  SC_STATUS_PARSE = 3,
  // The solver, LP or stability oracle failed.
  SC_STATUS_SOLVER = 4,
  // An argument was out of range.
  SC_STATUS_INVALID_ARGUMENT = 5,
  // A Rust panic was caught at the boundary.
  SC_STATUS_PANIC = 6,
} ScStatus;

// Outcome recorded in a certificate.
typedef enum ScVerdict {
  // The returned solution is the unique optimum.
  SC_VERDICT_OPTIMAL = 0,
  // The instance is certainly not stable enough; no solution is returned.
  SC_VERDICT_NOT_STABLE = 1,
  // Heuristic output whose optimality rests on the input's stability.
  SC_VERDICT_CANDIDATE = 2,
} ScVerdict;

// Solver output for one instance.
typedef struct ScCertificate ScCertificate;

// Parsed, validated instance.
typedef struct ScInstance ScInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last call on this thread if it failed, or null. Valid until the next call.
const char *sc_last_error(void);

// Library version as a static string.
const char *sc_version(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void sc_string_free(char *s);

// Parses and validates an instance from JSON.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum ScStatus sc_instance_from_json(const char *json, struct ScInstance **out);

// Canonical JSON for the instance.
//
// # Safety
// `inst` must be a live handle; `out` must be writable.
enum ScStatus sc_instance_to_json(const struct ScInstance *inst, char **out);

// Releases an instance. Null is ignored.
//
// # Safety
// `inst` must come from [`sc_instance_from_json`] and not have been freed.
void sc_instance_free(struct ScInstance *inst);

// Runs the problem's robust algorithm with default options.
//
// # Safety
// `inst` must be a live handle; `out` must be writable.
enum ScStatus sc_solve(const struct ScInstance *inst, struct ScCertificate **out);

// Parses a certificate from JSON.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum ScStatus sc_certificate_from_json(const char *json, struct ScCertificate **out);

// The certificate's verdict.
//
// # Safety
// `cert` must be a live handle; `out` must be writable.
enum ScStatus sc_certificate_verdict(const struct ScCertificate *cert, enum ScVerdict *out);

// Objective of the returned solution as `"p/q"`, or null when there is none.
//
// # Safety
// `cert` must be a live handle; `out` must be writable.
enum ScStatus sc_certificate_objective(const struct ScCertificate *cert, char **out);

// Certificate as pretty JSON.
//
// # Safety
// `cert` must be a live handle; `out` must be writable.
enum ScStatus sc_certificate_to_json(const struct ScCertificate *cert, char **out);

// Re-checks the certificate's solution against the instance; `valid` is set to 1 or 0.
//
// # Safety
// Both handles must be live; `valid` must be writable.
enum ScStatus sc_verify(const struct ScCertificate *cert,
                        const struct ScInstance *inst,
                        int32_t *valid);

// Releases a certificate. Null is ignored.
//
// # Safety
// `cert` must come from this library and not have been freed.
void sc_certificate_free(struct ScCertificate *cert);

// Exact stability margin by enumeration, as `"p/q"` or `"inf"`. `max_solutions = 0`
// keeps the default budget and size caps.
//
// # Safety
// `inst` must be a live handle; `out` must be writable.
enum ScStatus sc_stability_margin(const struct ScInstance *inst,
                                  uintptr_t max_solutions,
                                  char **out);

// Whether the instance is γ-stable, with γ given as `"p/q"` or a decimal; sets 1 or 0.
//
// # Safety
// `inst` must be a live handle, `gamma` NUL-terminated, `stable` writable.
enum ScStatus sc_is_stable(const struct ScInstance *inst, const char *gamma, int32_t *stable);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STABLECUT_H */
