/* C interface for the hypercode library. */

#ifndef HYPERCODE_H
#define HYPERCODE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Success; for verdict-producing calls, the positive outcome.
 */
#define HC_OK 0

/**
 * The computation succeeded but reports a failure or violation.
 */
#define HC_FAIL 1

/**
 * Malformed or inconsistent input.
 */
#define HC_ERR_INPUT 2

/**
 * A required pointer argument was null.
 */
#define HC_ERR_NULL 3

/**
 * An argument string was not valid UTF-8.
 */
#define HC_ERR_UTF8 4

/**
 * Internal failure (panic caught at the boundary).
 */
#define HC_ERR_INTERNAL 5

typedef struct HcCode HcCode;

typedef struct HcLattice HcLattice;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string; do not free.
 */
const char *hc_version(void);

/**
 * Release a string returned by this library. Null is a no-op.
 */
void hc_string_free(char *s);

/**
 * Parse a JSON code file (vectors, or descriptors when vectors are empty)
 * into a handle. On success writes the handle and returns `HC_OK`.
 */
int hc_code_parse(const char *json, struct HcCode **out);

/**
 * Number of vectors in the code, or -1 on null.
 */
int hc_code_size(const struct HcCode *code);

/**
 * Verify strictness. Returns `HC_OK` when the code is strict, `HC_FAIL`
 * when it is not, and an error code otherwise. When `out_report` is
 * non-null it receives the full JSON report in either verdict case.
 */
int hc_code_verify(const struct HcCode *code, double tol, char **out_report);

void hc_code_free(struct HcCode *code);

/**
 * Parse a JSON lattice file into a handle.
 */
int hc_lattice_parse(const char *json, struct HcLattice **out);

/**
 * Run the family dichotomy. `HC_OK` for a certificate, `HC_FAIL` for a
 * violating pair; `out_report` (optional) receives the JSON outcome.
 */
int hc_lattice_check(const struct HcLattice *lattice, char **out_report);

void hc_lattice_free(struct HcLattice *lattice);

/**
 * Maximal cosine of the viewing angle in the three-ball configuration with
 * radii `d1`, `d2` against a unit third ball. Writes the value to
 * `out_max_cos`.
 */
int hc_lemma61_max(double d1, double d2, uint32_t restarts, uint64_t seed, double *out_max_cos);

/**
 * Integer sandwich for the maximal strict code size in dimension `dim`.
 * Bounds that cannot be derived from built-in kissing values are reported
 * as -1.
 */
int hc_bounds(uint32_t dim, int64_t *out_lower, int64_t *out_upper);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* HYPERCODE_H */
