#ifndef DLM_H
#define DLM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>

typedef enum DlmFrameClass {
  DLM_FRAME_CLASS_OBSERVATIONAL = 0,
  DLM_FRAME_CLASS_EUCLIDEAN_TRANSITIVE = 1,
  DLM_FRAME_CLASS_ALL = 2,
} DlmFrameClass;

/**
 * Result codes. Values 0 to 5 match the exit codes of the `dlm` binary.
 */
typedef enum DlmStatus {
  DLM_STATUS_OK = 0,
  DLM_STATUS_FALSE = 1,
  DLM_STATUS_PARSE_ERROR = 2,
  DLM_STATUS_INVALID = 3,
  DLM_STATUS_NOT_EXECUTABLE = 4,
  DLM_STATUS_BUDGET = 5,
  DLM_STATUS_NULL_ARGUMENT = 6,
  DLM_STATUS_UTF8 = 7,
  DLM_STATUS_PANIC = 8,
} DlmStatus;

/**
 * A model with an optional point.
 */
typedef struct DlmModel DlmModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Owned by the
 * library; valid until the next call.
 */
const char *dlm_last_error(void);

void dlm_string_free(char *s);

/**
 * Reads a JSON model document. Structure and observation consistency are
 * checked; frame conditions are not.
 */
enum DlmStatus dlm_model_from_json(const char *json, struct DlmModel **out);

/**
 * The French Drop starting model, pointed at `w`.
 */
enum DlmStatus dlm_french_drop(struct DlmModel **out);

void dlm_model_free(struct DlmModel *model);

/**
 * Number of worlds, or 0 for a null handle.
 */
size_t dlm_model_world_count(const struct DlmModel *model);

enum DlmStatus dlm_model_to_json(const struct DlmModel *model, char **out);

enum DlmStatus dlm_model_to_dot(const struct DlmModel *model, char **out);

/**
 * Evaluates `formula` at the model's point: `Ok` when it holds, `False`
 * when it does not.
 */
enum DlmStatus dlm_check(const struct DlmModel *model, const char *formula);

/**
 * Applies an action expression such as `show-(a, r & ~l)` at the model's
 * point. A failing precondition gives `NotExecutable` unless `force` is set.
 */
enum DlmStatus dlm_update(const struct DlmModel *model,
                          const char *action,
                          bool force,
                          struct DlmModel **out);

/**
 * Rewrites `formula` without dynamic modalities. `agents` and `props` are
 * comma-separated names.
 */
enum DlmStatus dlm_translate(const char *formula,
                             const char *agents,
                             const char *props,
                             char **out);

/**
 * Bounded validity check: `Ok` when no countermodel exists within the
 * bounds, `False` otherwise. The first countermodel is stored in
 * `countermodel` unless it is null.
 */
enum DlmStatus dlm_verify(const char *formula,
                          const char *agents,
                          const char *props,
                          size_t max_worlds,
                          enum DlmFrameClass frame_class,
                          struct DlmModel **countermodel);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* DLM_H */
