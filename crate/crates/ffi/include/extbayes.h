#ifndef EXTBAYES_H
#define EXTBAYES_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. The first four match the command-line exit codes.
 */
typedef enum EbStatus {
  /**
   * The property holds.
   */
  EB_STATUS_OK = 0,
  /**
   * The property fails; the report carries the violation.
   */
  EB_STATUS_FAILS = 1,
  EB_STATUS_INPUT_ERROR = 2,
  EB_STATUS_RESOURCE_CAP = 3,
  EB_STATUS_NULL_POINTER = 4,
  EB_STATUS_INVALID_UTF8 = 5,
  EB_STATUS_PANIC = 6,
} EbStatus;

/**
 * Opaque scenario handle.
 */
typedef struct EbScenario EbScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a scenario from JSON text.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a valid pointer.
 */
enum EbStatus eb_scenario_parse(const char *json, struct EbScenario **out);

/**
 * # Safety
 * `scenario` must come from [`eb_scenario_parse`] and not be freed twice.
 */
void eb_scenario_free(struct EbScenario *scenario);

/**
 * Number of periods in the scenario, or 0 for a null handle.
 *
 * # Safety
 * `scenario` must be null or a live handle.
 */
size_t eb_scenario_periods(const struct EbScenario *scenario);

/**
 * # Safety
 * `scenario` must be a live handle and `out_json` a valid pointer.
 */
enum EbStatus eb_check(const struct EbScenario *scenario, char **out_json);

/**
 * # Safety
 * `scenario` must be a live handle and `out_json` a valid pointer.
 */
enum EbStatus eb_witness(const struct EbScenario *scenario, char **out_json);

/**
 * # Safety
 * `scenario` must be a live handle and `out_json` a valid pointer.
 */
enum EbStatus eb_chain(const struct EbScenario *scenario, char **out_json);

/**
 * # Safety
 * `scenario` must be a live handle and `out_json` a valid pointer.
 */
enum EbStatus eb_prefs(const struct EbScenario *scenario, char **out_json);

/**
 * # Safety
 * `scenario` must be a live handle and `out_json` a valid pointer.
 */
enum EbStatus eb_compile(const struct EbScenario *scenario, char **out_json);

/**
 * Conditional bounds of `target` given `given`. Events are formulas for
 * propositional scenarios, otherwise comma-separated state names. A
 * `vertex_cap` of 0 selects the default.
 *
 * # Safety
 * `scenario` must be a live handle, `given` and `target` nul-terminated
 * strings, and `out_json` a valid pointer.
 */
enum EbStatus eb_bounds(const struct EbScenario *scenario,
                        const char *given,
                        const char *target,
                        uint64_t vertex_cap,
                        char **out_json);

/**
 * Message for the last error on this thread. Valid until the next call into
 * this library from the same thread.
 */
const char *eb_last_error(void);

/**
 * # Safety
 * `s` must be null or a report string returned by this library.
 */
void eb_string_free(char *s);

/**
 * Library version as a static string.
 */
const char *eb_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EXTBAYES_H */
