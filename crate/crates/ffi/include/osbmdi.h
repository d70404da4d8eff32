#ifndef OSBMDI_H
#define OSBMDI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OsbStatus {
  OSB_STATUS_OK = 0,
  OSB_STATUS_NULL_POINTER = 1,
  OSB_STATUS_INVALID_UTF8 = 2,
  OSB_STATUS_INVALID_ARGUMENT = 3,
  OSB_STATUS_INVALID_CONFIG = 4,
  OSB_STATUS_PROTOCOL = 5,
  OSB_STATUS_ANALYSIS = 6,
  OSB_STATUS_PANIC = 7,
} OsbStatus;

/**
 * Session configuration handle.
 */
typedef struct OsbConfig OsbConfig;

/**
 * Result of a batch run.
 */
typedef struct OsbReport OsbReport;

typedef struct OsbSummary {
  uint64_t sessions;
  uint64_t completed;
  uint64_t aborted;
  uint64_t symbols_sent;
  uint64_t symbols_correct;
  double decode_accuracy;
  double stage1_error_rate;
  double stage2_error_rate;
} OsbSummary;

typedef struct OsbDetection {
  uint64_t checks;
  uint64_t failures;
  double rate;
  double half_width;
} OsbDetection;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next `osb_` call on this thread.
 */
const char *osb_last_error(void);

/**
 * Static, NUL-terminated library version.
 */
const char *osb_version(void);

/**
 * Default configuration. Never null.
 */
struct OsbConfig *osb_config_new(void);

/**
 * Parses a TOML document with a `[session]` table.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` writable.
 */
enum OsbStatus osb_config_from_toml(const char *text, struct OsbConfig **out);

/**
 * # Safety
 * `cfg` must come from this library and not be used afterwards. Null is
 * ignored.
 */
void osb_config_free(struct OsbConfig *cfg);

/**
 * # Safety
 * `cfg` must be a live handle.
 */
enum OsbStatus osb_config_set_seed(struct OsbConfig *cfg, uint64_t seed);

/**
 * Message pairs per party; must be positive and even.
 *
 * # Safety
 * `cfg` must be a live handle.
 */
enum OsbStatus osb_config_set_pairs(struct OsbConfig *cfg, size_t n_pairs);

/**
 * `"qsdc"`, `"qd"` or `"qkd"`.
 *
 * # Safety
 * `cfg` must be a live handle and `mode` a NUL-terminated string.
 */
enum OsbStatus osb_config_set_mode(struct OsbConfig *cfg, const char *mode);

/**
 * Attack in `NAME[:key=value,...]` form; null removes the attack.
 *
 * # Safety
 * `cfg` must be a live handle; `attack` null or NUL-terminated.
 */
enum OsbStatus osb_config_set_attack(struct OsbConfig *cfg, const char *attack);

/**
 * Noise in `NAME:PARAM` form; null removes the noise.
 *
 * # Safety
 * `cfg` must be a live handle; `noise` null or NUL-terminated.
 */
enum OsbStatus osb_config_set_noise(struct OsbConfig *cfg, const char *noise);

/**
 * # Safety
 * `cfg` must be a live handle.
 */
enum OsbStatus osb_config_set_threshold(struct OsbConfig *cfg, double threshold);

/**
 * Runs sessions `0..sessions` and stores the report in `*out`.
 *
 * # Safety
 * `cfg` must be a live handle and `out` writable.
 */
enum OsbStatus osb_run(const struct OsbConfig *cfg, uint64_t sessions, struct OsbReport **out);

/**
 * # Safety
 * `report` must come from [`osb_run`] and not be used afterwards. Null is
 * ignored.
 */
void osb_report_free(struct OsbReport *report);

/**
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum OsbStatus osb_report_summary(const struct OsbReport *report, struct OsbSummary *out);

/**
 * Pooled detection estimate for the configured attack's characteristic
 * checks (all checks when there is no attack).
 *
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum OsbStatus osb_report_detection(const struct OsbReport *report, struct OsbDetection *out);

/**
 * The full report as TOML. Release with [`osb_string_free`].
 *
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum OsbStatus osb_report_to_toml(const struct OsbReport *report, char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards. Null is
 * ignored.
 */
void osb_string_free(char *s);

/**
 * Dialogue leakage for the given state sets and announcements, uniform
 * priors.
 *
 * # Safety
 * `alice` and `bob` must point to `n_alice` and `n_bob` label codes;
 * `leaked` and `consistent` must be writable.
 */
enum OsbStatus osb_leakage_bits(const uint8_t *alice,
                                size_t n_alice,
                                const uint8_t *bob,
                                size_t n_bob,
                                uint8_t bmo1,
                                uint8_t bmo2,
                                double *leaked,
                                size_t *consistent);

/**
 * Receiver-side decoding of a direct-mode pair: the sender's Pauli symbol
 * from both initial labels and both announcements.
 *
 * # Safety
 * `symbol` must be writable.
 */
enum OsbStatus osb_decode(uint8_t alice_init,
                          uint8_t bob_init,
                          uint8_t bmo1,
                          uint8_t bmo2,
                          uint8_t *symbol);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OSBMDI_H */
