/* C interface for the menger length-functional library. */

#ifndef MENGER_H
#define MENGER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Which length functional an estimate sweep targets.
 */
typedef enum MengerFunctional {
  /**
   * Menger length `L_M` (spanning trees).
   */
  MENGER_FUNCTIONAL_MENGER = 0,
  /**
   * Menger-Choquet length `L_MC` (free Steiner points).
   */
  MENGER_FUNCTIONAL_MENGER_CHOQUET = 1,
  /**
   * Intrinsic Menger length `L_IM` (Steiner points from the set).
   */
  MENGER_FUNCTIONAL_INTRINSIC_MENGER = 2,
} MengerFunctional;

/**
 * Shape families exposed over the ABI.
 */
typedef enum MengerShapeKind {
  MENGER_SHAPE_KIND_SEGMENT = 0,
  MENGER_SHAPE_KIND_SEMICIRCLE_CHAIN = 1,
  MENGER_SHAPE_KIND_KOCH = 2,
  MENGER_SHAPE_KIND_SHRUNK_KOCH = 3,
  MENGER_SHAPE_KIND_SQUARE_DIAGONALS = 4,
} MengerShapeKind;

/**
 * Result codes for every fallible entry point.
 */
typedef enum MengerStatus {
  MENGER_STATUS_OK = 0,
  MENGER_STATUS_NULL_POINTER = 1,
  MENGER_STATUS_UTF8 = 2,
  MENGER_STATUS_PARSE = 3,
  MENGER_STATUS_INVALID_ARGUMENT = 4,
  MENGER_STATUS_CAP_EXCEEDED = 5,
  MENGER_STATUS_COMPUTE = 6,
  MENGER_STATUS_PANIC = 7,
} MengerStatus;

/**
 * Opaque handle around a hit collection (ball centers plus radius).
 */
typedef struct MengerHitCollection MengerHitCollection;

/**
 * Opaque handle around a validated metric space.
 */
typedef struct MengerSpace MengerSpace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Most recent error message for this thread (empty when no error has
 * occurred). The pointer stays valid until the next failing call.
 */
const char *menger_last_error_message(void);

/**
 * Frees a string returned by any `*_json` entry point.
 *
 * # Safety
 * `s` must be a pointer previously returned by this library, or null.
 */
void menger_string_free(char *s);

/**
 * Parses a point-set JSON document (`{"dim": ..., "points": ...}` or
 * `{"matrix": ...}`) into a new space handle.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum MengerStatus menger_space_from_json(const char *json, struct MengerSpace **out);

/**
 * # Safety
 * `space` must come from [`menger_space_from_json`], or be null.
 */
void menger_space_free(struct MengerSpace *space);

/**
 * Number of points in the space; 0 for a null handle.
 *
 * # Safety
 * `space` must be a live handle or null.
 */
size_t menger_space_point_count(const struct MengerSpace *space);

/**
 * Distance between two points by index.
 *
 * # Safety
 * `space` must be a live handle and `out` a valid pointer.
 */
enum MengerStatus menger_dist(const struct MengerSpace *space, size_t i, size_t j, double *out);

/**
 * Hausdorff distance between two index sets; infinity when exactly one
 * side is empty.
 *
 * # Safety
 * Pointer arguments must be valid for the given lengths.
 */
enum MengerStatus menger_hausdorff(const struct MengerSpace *space,
                                   const size_t *a,
                                   size_t a_len,
                                   const size_t *b,
                                   size_t b_len,
                                   double *out);

/**
 * Minimum-spanning-tree length over the given terminals (all points when
 * the list is empty).
 *
 * # Safety
 * Pointer arguments must be valid for the given lengths.
 */
enum MengerStatus menger_mst_length(const struct MengerSpace *space,
                                    const size_t *terminals,
                                    size_t terminals_len,
                                    double *out);

/**
 * Exact euclidean Steiner minimal tree length for up to 4 terminals in
 * the plane.
 *
 * # Safety
 * Pointer arguments must be valid for the given lengths.
 */
enum MengerStatus menger_smt_euclidean_small(const struct MengerSpace *space,
                                             const size_t *terminals,
                                             size_t terminals_len,
                                             double *out);

/**
 * Exact Steiner tree length with Steiner points restricted to the given
 * candidate indices (Dreyfus-Wagner; at most 12 terminals).
 *
 * # Safety
 * Pointer arguments must be valid for the given lengths.
 */
enum MengerStatus menger_smt_restricted(const struct MengerSpace *space,
                                        const size_t *terminals,
                                        size_t terminals_len,
                                        const size_t *candidates,
                                        size_t candidates_len,
                                        double *out);

/**
 * Runs a length-functional estimate over an eps-net sweep and returns the
 * full JSON report (schedule, per-level engines and brackets, witness
 * net). The set may be empty to mean "all points".
 *
 * # Safety
 * Pointer arguments must be valid for the given lengths.
 */
enum MengerStatus menger_estimate_json(const struct MengerSpace *space,
                                       enum MengerFunctional functional,
                                       const size_t *set,
                                       size_t set_len,
                                       const double *eps_schedule,
                                       size_t schedule_len,
                                       uint64_t seed,
                                       char **out);

/**
 * Builds the delta-cover certificate for the set and returns its JSON
 * report (elements, diameter sum, length certificate, guaranteed bound).
 *
 * # Safety
 * Pointer arguments must be valid for the given lengths.
 */
enum MengerStatus menger_proof_cover_json(const struct MengerSpace *space,
                                          const size_t *set,
                                          size_t set_len,
                                          double delta,
                                          char **out);

/**
 * Builds a hit collection for the set at accuracy `eps`.
 *
 * # Safety
 * Pointer arguments must be valid for the given lengths.
 */
enum MengerStatus menger_hit_collection(const struct MengerSpace *space,
                                        const size_t *set,
                                        size_t set_len,
                                        double eps,
                                        struct MengerHitCollection **out);

/**
 * # Safety
 * `hc` must come from [`menger_hit_collection`], or be null.
 */
void menger_hit_collection_free(struct MengerHitCollection *hc);

/**
 * Radius of the collection's open balls; NaN for a null handle.
 *
 * # Safety
 * `hc` must be a live handle or null.
 */
double menger_hit_collection_radius(const struct MengerHitCollection *hc);

/**
 * Whether the given set meets every ball of the collection.
 *
 * # Safety
 * Pointer arguments must be valid for the given lengths.
 */
enum MengerStatus menger_check_hits(const struct MengerSpace *space,
                                    const struct MengerHitCollection *hc,
                                    const size_t *set,
                                    size_t set_len,
                                    bool *out);

/**
 * Generates an example shape; returns a JSON document
 * `{"points": <point-set>, "true_length": ..., "pitch": ...}` whose
 * `points` member can be fed back into [`menger_space_from_json`].
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum MengerStatus menger_shape_json(enum MengerShapeKind kind,
                                    size_t n,
                                    double base_length,
                                    size_t samples,
                                    char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* MENGER_H */
