/* C interface to the binmotion spatial-audio pipeline. */

#ifndef BINMOTION_H
#define BINMOTION_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum BmStatus {
  BmOk = 0,
  /**
   * A required pointer was null.
   */
  BmNullPointer = 1,
  /**
   * An argument failed validation (encoding, range, pairing).
   */
  BmInvalidArgument = 2,
  /**
   * File could not be read or written.
   */
  BmIo = 3,
  /**
   * Input parsed but violated a format or domain rule.
   */
  BmParse = 4,
  /**
   * The renderer rejected the inputs.
   */
  BmRender = 5,
  /**
   * A panic was caught at the boundary; state may be stale.
   */
  BmInternal = 6,
} BmStatus;

/**
 * Loaded HRIR grid.
 */
typedef struct BmHrirSet BmHrirSet;

/**
 * Loaded caption lexicon.
 */
typedef struct BmLexicon BmLexicon;

/**
 * A 20 Hz spatial trajectory with validity mask.
 */
typedef struct BmTrajectory BmTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. The pointer stays
 * valid until the next failing `bm_` call on the same thread.
 */
const char *bm_last_error(void);

/**
 * The built-in caption lexicon. Never fails; free with `bm_lexicon_free`.
 */
struct BmLexicon *bm_lexicon_default(void);

/**
 * Loads a lexicon JSON file.
 *
 * # Safety
 * `path` must be NUL-terminated; `out` must be a valid pointer.
 */
enum BmStatus bm_lexicon_load(const char *path, struct BmLexicon **out);

/**
 * # Safety
 * `lex` must come from `bm_lexicon_default`/`bm_lexicon_load` and not be
 * freed twice.
 */
void bm_lexicon_free(struct BmLexicon *lex);

/**
 * Loads an HRIR set manifest (JSON, WAV files relative to it).
 *
 * # Safety
 * `path` must be NUL-terminated; `out` must be a valid pointer.
 */
enum BmStatus bm_hrir_set_load(const char *path, struct BmHrirSet **out);

/**
 * # Safety
 * `set` must come from `bm_hrir_set_load` and not be freed twice.
 */
void bm_hrir_set_free(struct BmHrirSet *set);

/**
 * Reads a trajectory CSV (`t_s,azimuth_deg,elevation_deg,distance_m,mask`).
 *
 * # Safety
 * `path` must be NUL-terminated; `out` must be a valid pointer.
 */
enum BmStatus bm_trajectory_from_csv(const char *path, struct BmTrajectory **out);

/**
 * Caption-to-trajectory baseline: parses `caption` and synthesizes the
 * category-midpoint linear trajectory over the given event window.
 *
 * # Safety
 * `caption` must be NUL-terminated; `lex` and `out` must be valid.
 */
enum BmStatus bm_trajectory_from_caption(const char *caption,
                                         double t0_s,
                                         double t1_s,
                                         double clip_duration_s,
                                         const struct BmLexicon *lex,
                                         struct BmTrajectory **out);

/**
 * Number of 20 Hz samples, or 0 for a null handle.
 */
uintptr_t bm_trajectory_len(const struct BmTrajectory *traj);

/**
 * Copies sample `k` into the out-parameters (any may be null to skip).
 *
 * # Safety
 * Non-null out-parameters must point to writable memory.
 */
enum BmStatus bm_trajectory_sample(const struct BmTrajectory *traj,
                                   uintptr_t k,
                                   double *azimuth_deg,
                                   double *elevation_deg,
                                   double *distance_m,
                                   uint8_t *mask);

/**
 * # Safety
 * `traj` must come from a `bm_trajectory_*` constructor and not be freed
 * twice.
 */
void bm_trajectory_free(struct BmTrajectory *traj);

/**
 * Renders `in_wav` (mono) along `traj` through `set`, writing a stereo
 * 32-bit float WAV to `out_wav`.
 *
 * # Safety
 * Paths must be NUL-terminated; handles must be valid.
 */
enum BmStatus bm_render_file(const char *in_wav,
                             const struct BmTrajectory *traj,
                             const struct BmHrirSet *set,
                             const char *out_wav);

/**
 * Masked mean trajectory loss; circular for angles.
 *
 * # Safety
 * Handles must be valid; `out` must be writable.
 */
enum BmStatus bm_traj_loss(const struct BmTrajectory *pred,
                           const struct BmTrajectory *gt,
                           double w_az,
                           double w_el,
                           double w_ds,
                           double *out);

/**
 * Start/end endpoint loss at the first and last valid ground-truth steps.
 *
 * # Safety
 * Handles must be valid; `out` must be writable.
 */
enum BmStatus bm_endpoint_loss(const struct BmTrajectory *pred,
                               const struct BmTrajectory *gt,
                               double w_az,
                               double w_el,
                               double w_ds,
                               double *out);

/**
 * Total loss: trajectory term plus `lambda_time` times the endpoint term.
 *
 * # Safety
 * Handles must be valid; `out` must be writable.
 */
enum BmStatus bm_total_loss(const struct BmTrajectory *pred,
                            const struct BmTrajectory *gt,
                            double w_az,
                            double w_el,
                            double w_ds,
                            double lambda_time,
                            double *out);

/**
 * Circular angular difference in degrees, in [0, 180].
 */
double bm_circular_delta(double x_deg, double y_deg);

/**
 * Parses a caption into its motion attributes, returned as a JSON string
 * (category names per side, plus the omitted list). Free the string with
 * `bm_string_free`.
 *
 * # Safety
 * `caption` must be NUL-terminated; `lex` and `out` must be valid.
 */
enum BmStatus bm_parse_caption_json(const char *caption, const struct BmLexicon *lex, char **out);

/**
 * Frees a string returned by this library.
 *
 * # Safety
 * `s` must come from a `bm_*` call that documents this deallocator.
 */
void bm_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BINMOTION_H */
