/* C interface for the phishscope URL obfuscation classifier. */

#ifndef PHISHSCOPE_H
#define PHISHSCOPE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes for every ABI call.
 */
typedef enum PhishscopeStatus {
  PHISHSCOPE_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  PHISHSCOPE_STATUS_NULL_ARGUMENT = 1,
  /**
   * An input string was not valid UTF-8.
   */
  PHISHSCOPE_STATUS_INVALID_UTF8 = 2,
  /**
   * The URL did not parse; nothing was classified.
   */
  PHISHSCOPE_STATUS_PARSE_ERROR = 3,
  /**
   * The label is not valid punycode.
   */
  PHISHSCOPE_STATUS_INVALID_PUNYCODE = 4,
  /**
   * A configuration value or file was rejected.
   */
  PHISHSCOPE_STATUS_INVALID_CONFIG = 5,
} PhishscopeStatus;

/**
 * Opaque analyzer handle wrapping a detector configuration.
 */
typedef struct PhishscopeAnalyzer PhishscopeAnalyzer;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static descriptive name for a status code.
 */
const char *phishscope_status_name(enum PhishscopeStatus status);

/**
 * Create an analyzer with the bundled default configuration.
 */
struct PhishscopeAnalyzer *phishscope_analyzer_new(void);

/**
 * Release an analyzer.
 *
 * # Safety
 * `analyzer` must be a pointer returned by [`phishscope_analyzer_new`] that
 * has not been freed, or NULL (a no-op).
 */
void phishscope_analyzer_free(struct PhishscopeAnalyzer *analyzer);

/**
 * Set the minimum extra hostname length for the oversized-subdomain
 * detector. Zero is rejected.
 *
 * # Safety
 * `analyzer` must be a live pointer from [`phishscope_analyzer_new`].
 */
enum PhishscopeStatus phishscope_analyzer_set_type3_threshold(struct PhishscopeAnalyzer *analyzer,
                                                              size_t threshold);

/**
 * Set the maximum edit distance for the look-alike-domain detector.
 *
 * # Safety
 * `analyzer` must be a live pointer from [`phishscope_analyzer_new`].
 */
enum PhishscopeStatus phishscope_analyzer_set_edit_distance(struct PhishscopeAnalyzer *analyzer,
                                                            size_t distance);

/**
 * Replace the brand list from a file (one lowercase brand per line).
 *
 * # Safety
 * `analyzer` must be a live pointer from [`phishscope_analyzer_new`];
 * `path` must be a NUL-terminated string.
 */
enum PhishscopeStatus phishscope_analyzer_load_brands(struct PhishscopeAnalyzer *analyzer,
                                                      const char *path);

/**
 * Replace the public-suffix snapshot from a file.
 *
 * # Safety
 * Same contract as [`phishscope_analyzer_load_brands`].
 */
enum PhishscopeStatus phishscope_analyzer_load_suffixes(struct PhishscopeAnalyzer *analyzer,
                                                        const char *path);

/**
 * Classify one URL. On `Ok`, `*out_json` receives a JSON object
 * `{"url": ..., "detections": [{"type", "evidence", "score_inputs"}, ...]}`
 * that the caller frees with [`phishscope_string_free`].
 *
 * # Safety
 * `analyzer` must be a live pointer from [`phishscope_analyzer_new`];
 * `url` must be a NUL-terminated string; `out_json` must be a valid
 * pointer to a `char*` slot.
 */
enum PhishscopeStatus phishscope_classify_json(const struct PhishscopeAnalyzer *analyzer,
                                               const char *url,
                                               char **out_json);

/**
 * Decode one `xn--` label to UTF-8. The caller frees `*out` with
 * [`phishscope_string_free`].
 *
 * # Safety
 * `label` must be a NUL-terminated string; `out` must be a valid pointer
 * to a `char*` slot.
 */
enum PhishscopeStatus phishscope_decode_punycode(const char *label, char **out);

/**
 * Release a string produced by this library.
 *
 * # Safety
 * `s` must be a pointer previously returned through an out-parameter of
 * this library and not yet freed, or NULL (a no-op).
 */
void phishscope_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PHISHSCOPE_H */
