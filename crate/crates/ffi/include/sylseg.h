#ifndef SYLSEG_H
#define SYLSEG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SylsegStatus {
  SYLSEG_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  SYLSEG_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  SYLSEG_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed input text or an invalid setting.
   */
  SYLSEG_STATUS_INVALID_INPUT = 3,
  /**
   * A file could not be read or written.
   */
  SYLSEG_STATUS_IO = 4,
  /**
   * A model file was malformed or of the wrong version.
   */
  SYLSEG_STATUS_MODEL = 5,
  /**
   * Training could not proceed on the given data.
   */
  SYLSEG_STATUS_TRAINING = 6,
  /**
   * Internal error; the library caught a panic.
   */
  SYLSEG_STATUS_PANIC = 7,
} SylsegStatus;

/**
 * Opaque handle to a loaded model.
 */
typedef struct SylsegModel SylsegModel;

/**
 * Word-level scores, percentages expressed as ratios in [0, 1].
 */
typedef struct SylsegScore {
  double precision;
  double recall;
  double f1;
  uint64_t gold_words;
  uint64_t pred_words;
  uint64_t correct_words;
} SylsegScore;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Loads a model file and stores a new handle in `*out`.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SylsegStatus sylseg_model_load(const char *path, struct SylsegModel **out);

/**
 * Like [`sylseg_model_load`], but decodes with the lexicon at
 * `lexicon_path` instead of the one stored in the model. A null
 * `lexicon_path` keeps the stored lexicon.
 *
 * # Safety
 * `path` and `lexicon_path` (if not null) must be NUL-terminated strings and
 * `out` a valid pointer.
 */
enum SylsegStatus sylseg_model_load_with_lexicon(const char *path,
                                                 const char *lexicon_path,
                                                 struct SylsegModel **out);

/**
 * Releases a model handle. Null is ignored.
 *
 * # Safety
 * `model` must be null or a handle from `sylseg_model_load*` not yet freed.
 */
void sylseg_model_free(struct SylsegModel *model);

/**
 * Segments one line of space-separated syllables. On success `*out` holds
 * a new string with word-internal gaps written as `_`.
 *
 * # Safety
 * `model` must be a live handle, `line` a NUL-terminated string and `out` a
 * valid pointer. A handle may be shared between threads.
 */
enum SylsegStatus sylseg_segment_line(const struct SylsegModel *model,
                                      const char *line,
                                      char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void sylseg_string_free(char *s);

/**
 * Message for the last failed call on this thread, or "" after a success.
 * The pointer stays valid until the next library call on this thread.
 */
const char *sylseg_last_error(void);

/**
 * Library and model-format version, as a static string.
 */
const char *sylseg_version(void);

/**
 * Trains a model on an underscore-segmented corpus and writes it to
 * `out_path`. `lexicon`, `family` and `middle` may be null. `features` is a
 * comma list drawn from base, long, sep and sfx; null means all four.
 *
 * # Safety
 * Every non-null pointer must be a NUL-terminated string.
 */
enum SylsegStatus sylseg_train(const char *corpus,
                               const char *lexicon,
                               const char *family,
                               const char *middle,
                               const char *features,
                               double c,
                               uint64_t seed,
                               const char *out_path);

/**
 * Scores a predicted segmentation file against a gold one.
 *
 * # Safety
 * `gold` and `pred` must be NUL-terminated strings and `out` a valid
 * pointer.
 */
enum SylsegStatus sylseg_score_files(const char *gold, const char *pred, struct SylsegScore *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SYLSEG_H */
