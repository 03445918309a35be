#ifndef SOL2EB_H
#define SOL2EB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum Sol2ebStatus {
  SOL2EB_STATUS_OK = 0,
  SOL2EB_STATUS_NULL_POINTER = 1,
  SOL2EB_STATUS_INVALID_UTF8 = 2,
  SOL2EB_STATUS_INVALID_ARGUMENT = 3,
  /**
   * Solidity, `.eb` or I/O input could not be loaded.
   */
  SOL2EB_STATUS_INPUT_ERROR = 4,
  SOL2EB_STATUS_TYPE_ERROR = 5,
  SOL2EB_STATUS_GUARD_FAILED = 6,
  SOL2EB_STATUS_EVENT_ERROR = 7,
  SOL2EB_STATUS_SIMULATION_ERROR = 8,
  SOL2EB_STATUS_PANIC = 9,
} Sol2ebStatus;

/**
 * A loaded Event-B project with its optional translation report.
 */
typedef struct Sol2ebProject Sol2ebProject;

/**
 * An animation session over one machine.
 */
typedef struct Sol2ebSession Sol2ebSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Valid until the
 * next call into this library on the same thread.
 */
const char *sol2eb_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sol2eb_version(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void sol2eb_string_free(char *s);

/**
 * Translates Solidity `source`; `file_name` labels source spans.
 *
 * # Safety
 * Pointers must be valid NUL-terminated strings; `out` must be writable.
 */
enum Sol2ebStatus sol2eb_project_from_solidity(const char *file_name,
                                               const char *source,
                                               struct Sol2ebProject **out);

/**
 * Parses `count` `.eb` texts into a project called `name`.
 *
 * # Safety
 * `file_names` and `texts` must each point to `count` valid strings.
 */
enum Sol2ebStatus sol2eb_project_from_eb(const char *name,
                                         const char *const *file_names,
                                         const char *const *texts,
                                         size_t count,
                                         struct Sol2ebProject **out);

/**
 * Loads a `.sol` file or a directory of `.eb` files.
 *
 * # Safety
 * `path` must be a valid string; `out` must be writable.
 */
enum Sol2ebStatus sol2eb_project_load(const char *path, struct Sol2ebProject **out);

/**
 * # Safety
 * `project` must come from this library and not have been freed.
 */
void sol2eb_project_free(struct Sol2ebProject *project);

/**
 * Canonical `.eb` text as a JSON array of `{"file", "text"}` objects.
 *
 * # Safety
 * `project` must be live; `out_json` must be writable.
 */
enum Sol2ebStatus sol2eb_project_print(const struct Sol2ebProject *project, char **out_json);

/**
 * Checks every proof obligation and writes the JSON report. `violated`, if
 * not null, receives the number of violated or unsupported obligations.
 *
 * # Safety
 * `project` must be live; `out_json` must be writable.
 */
enum Sol2ebStatus sol2eb_project_check(const struct Sol2ebProject *project,
                                       uint32_t addr,
                                       int64_t int_lo,
                                       int64_t int_hi,
                                       bool all,
                                       char **out_json,
                                       size_t *violated);

/**
 * Starts a session. `machine` may be null for the most concrete machine;
 * `constants_json` may be null or a JSON object of fixed constants.
 *
 * # Safety
 * `project` must be live; string arguments valid or null where allowed.
 */
enum Sol2ebStatus sol2eb_session_new(const struct Sol2ebProject *project,
                                     const char *machine,
                                     const char *constants_json,
                                     uint32_t addr,
                                     int64_t int_lo,
                                     int64_t int_hi,
                                     struct Sol2ebSession **out);

/**
 * # Safety
 * `session` must come from this library and not have been freed.
 */
void sol2eb_session_free(struct Sol2ebSession *session);

/**
 * `{variables, previous, constants, invariants, step}` as JSON.
 *
 * # Safety
 * `session` must be live; `out_json` must be writable.
 */
enum Sol2ebStatus sol2eb_session_state(const struct Sol2ebSession *session, char **out_json);

/**
 * Enabled events with their parameter offers as a JSON array.
 *
 * # Safety
 * `session` must be live; `out_json` must be writable.
 */
enum Sol2ebStatus sol2eb_session_events(const struct Sol2ebSession *session, char **out_json);

/**
 * Fires `event` with `params_json` (a JSON object, or null when the event
 * has no parameters) and writes the step result.
 *
 * # Safety
 * `session` must be live; strings valid; `out_json` writable or null.
 */
enum Sol2ebStatus sol2eb_session_fire(struct Sol2ebSession *session,
                                      const char *event,
                                      const char *params_json,
                                      char **out_json);

/**
 * # Safety
 * `session` must be live.
 */
enum Sol2ebStatus sol2eb_session_undo(struct Sol2ebSession *session);

/**
 * # Safety
 * `session` must be live.
 */
enum Sol2ebStatus sol2eb_session_reset(struct Sol2ebSession *session);

/**
 * The trace document as JSON.
 *
 * # Safety
 * `session` must be live; `out_json` must be writable.
 */
enum Sol2ebStatus sol2eb_session_trace(const struct Sol2ebSession *session, char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SOL2EB_H */
