#ifndef INCIDENCE_H
#define INCIDENCE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum IncStatus {
  INC_STATUS_OK = 0,
  INC_STATUS_NULL_POINTER = 1,
  INC_STATUS_INVALID_UTF8 = 2,
  INC_STATUS_PARSE = 3,
  INC_STATUS_GATE = 4,
  INC_STATUS_REFUTED = 5,
  INC_STATUS_NOT_APPLICABLE = 6,
  INC_STATUS_OVERFLOW = 7,
  INC_STATUS_INTERNAL = 8,
} IncStatus;

/**
 * Opaque linear map on an incidence algebra.
 */
typedef struct IncMap IncMap;

/**
 * Opaque finite poset.
 */
typedef struct IncPoset IncPoset;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread, or NULL. Valid until the
 * next call into this library on the same thread.
 */
const char *inc_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be NULL or a pointer obtained from this library, freed once.
 */
void inc_string_free(char *s);

/**
 * Builtin poset by name (`chain:N`, `antichain:N`, `v`, `diamond`, ...).
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum IncStatus inc_poset_builtin(const char *name, struct IncPoset **out);

/**
 * Poset from the text format.
 *
 * # Safety
 * `source` must be a NUL-terminated string; `out` must be writable.
 */
enum IncStatus inc_poset_parse(const char *source, struct IncPoset **out);

/**
 * # Safety
 * `poset` must be NULL or a handle from this library, freed once.
 */
void inc_poset_free(struct IncPoset *poset);

/**
 * Number of elements and dimension of the incidence algebra.
 *
 * # Safety
 * `poset` must be a live handle; out-pointers must be writable.
 */
enum IncStatus inc_poset_size(const struct IncPoset *poset, size_t *elements, size_t *dimension);

/**
 * Parses a map file body over `poset`. `field` is `"Q"` or `"Fp 5"`; it may
 * be NULL when the text carries a `field:` header.
 *
 * # Safety
 * `poset` must be a live handle; strings NUL-terminated or NULL where noted.
 */
enum IncStatus inc_map_parse(const struct IncPoset *poset,
                             const char *field,
                             const char *source,
                             struct IncMap **out);

/**
 * # Safety
 * `map` must be NULL or a handle from this library, freed once.
 */
void inc_map_free(struct IncMap *map);

/**
 * # Safety
 * `map` must be a live handle; `out` must be writable.
 */
enum IncStatus inc_map_is_unital(const struct IncMap *map, bool *out);

/**
 * Exact invertibility-preservation decision (finite fields).
 *
 * # Safety
 * `map` must be a live handle; `out` must be writable.
 */
enum IncStatus inc_map_preserves_invertibility(const struct IncMap *map, bool *out);

/**
 * Classification report as JSON. A map that is not a unital preserver still
 * returns `Ok`; the report carries the refutation.
 *
 * # Safety
 * `map` must be a live handle; `out` must be writable.
 */
enum IncStatus inc_map_classify_json(const struct IncMap *map, char **out);

/**
 * Closed-form number of unital invertibility preservers over a finite field.
 *
 * # Safety
 * `poset` must be a live handle; `field` NUL-terminated; `out` writable.
 */
enum IncStatus inc_theorem_count(const struct IncPoset *poset, const char *field, uint64_t *out);

/**
 * Brute-force census of all linear maps, as a JSON report.
 *
 * # Safety
 * `poset` must be a live handle; `field` NUL-terminated; `out` writable.
 */
enum IncStatus inc_census_json(const struct IncPoset *poset, const char *field, char **out);

/**
 * Reproduces one worked example by id, as a JSON report.
 *
 * # Safety
 * `id` NUL-terminated; `out` writable.
 */
enum IncStatus inc_example_json(const char *id, char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* INCIDENCE_H */
