#ifndef SCF_VERIFY_H
#define SCF_VERIFY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes.
 */
typedef enum ScfStatus {
  SCF_STATUS_OK = 0,
  SCF_STATUS_NULL_POINTER = 1,
  SCF_STATUS_INVALID_UTF8 = 2,
  SCF_STATUS_PARSE = 3,
  SCF_STATUS_INVALID_ARGUMENT = 4,
  SCF_STATUS_BUDGET = 5,
  SCF_STATUS_NOT_APPLICABLE = 6,
  SCF_STATUS_UNKNOWN_LEMMA = 7,
  SCF_STATUS_VERIFICATION_FAILED = 8,
  SCF_STATUS_INTERNAL = 9,
} ScfStatus;

/**
 * Opaque rule handle.
 */
typedef struct ScfRule ScfRule;

/**
 * Profile counts of one rule. `manipulable` is meaningful only when
 * `tops_only` is true.
 */
typedef struct ScfClassification {
  uint64_t total;
  uint64_t manipulable;
  uint64_t dictatorial;
  bool tops_only;
} ScfClassification;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call into the library on this thread.
 */
const char *scf_last_error_message(void);

/**
 * Library version, static.
 */
const char *scf_version(void);

/**
 * Parses a rule string. `agents` and `alts` give the dimensions closed forms
 * need; pass 0 for both to rely on a table's own header.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a writable pointer.
 */
enum ScfStatus scf_rule_parse(const char *text,
                              uint32_t agents,
                              uint32_t alts,
                              struct ScfRule **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `rule` must come from [`scf_rule_parse`] and not be used afterwards.
 */
void scf_rule_free(struct ScfRule *rule);

/**
 * # Safety
 * `rule` must be a live handle; `agents` and `alts` writable.
 */
enum ScfStatus scf_rule_dims(const struct ScfRule *rule, uint32_t *agents, uint32_t *alts);

/**
 * Canonical rule string; release with [`scf_string_free`].
 *
 * # Safety
 * `rule` must be a live handle; `out` writable.
 */
enum ScfStatus scf_rule_to_string(const struct ScfRule *rule, char **out);

/**
 * Evaluates the rule at a profile written as `a,b,c|c,b,a`; the outcome is
 * an alternative index.
 *
 * # Safety
 * `rule` must be a live handle, `profile` NUL-terminated, `out` writable.
 */
enum ScfStatus scf_rule_evaluate(const struct ScfRule *rule, const char *profile, uint32_t *out);

/**
 * The rule selects the common top whenever there is one.
 *
 * # Safety
 * `rule` must be a live handle; `out` writable.
 */
enum ScfStatus scf_rule_is_unanimous(const struct ScfRule *rule, bool *out);

/**
 * No agent ever gains by misreporting.
 *
 * # Safety
 * `rule` must be a live handle; `out` writable.
 */
enum ScfStatus scf_rule_is_strategy_proof(const struct ScfRule *rule, bool *out);

/**
 * The outcome depends only on the agents' tops.
 *
 * # Safety
 * `rule` must be a live handle; `out` writable.
 */
enum ScfStatus scf_rule_is_tops_only(const struct ScfRule *rule, bool *out);

/**
 * The outcome is never Pareto-dominated.
 *
 * # Safety
 * `rule` must be a live handle; `out` writable.
 */
enum ScfStatus scf_rule_is_efficient(const struct ScfRule *rule, bool *out);

/**
 * The dictator's index, or -1 when there is none.
 *
 * # Safety
 * `rule` must be a live handle; `out` writable.
 */
enum ScfStatus scf_rule_dictator(const struct ScfRule *rule, int32_t *out);

/**
 * Counts manipulable and dictatorial profiles.
 *
 * # Safety
 * `rule` must be a live handle; `out` writable.
 */
enum ScfStatus scf_rule_classify(const struct ScfRule *rule, struct ScfClassification *out);

/**
 * Census report as JSON. `samples == 0` means exhaustive. `holds` receives
 * whether the strategy-proof efficient rules are exactly the dictatorships.
 *
 * # Safety
 * `out` and `holds` must be writable; release `*out` with [`scf_string_free`].
 */
enum ScfStatus scf_census_json(uint32_t agents,
                               uint32_t alts,
                               uint64_t samples,
                               uint64_t seed,
                               char **out,
                               bool *holds);

/**
 * One check (`L1`, `L3`, `L4`, `L5`, `C1`, `C2`, `R1`, `R2`, `THM`) as JSON.
 * `samples == 0` means exhaustive.
 *
 * # Safety
 * `id` must be NUL-terminated; `out` and `passed` writable; release `*out`
 * with [`scf_string_free`].
 */
enum ScfStatus scf_verify_lemma_json(const char *id,
                                     uint32_t agents,
                                     uint32_t alts,
                                     uint64_t samples,
                                     uint64_t seed,
                                     char **out,
                                     bool *passed);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void scf_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCF_VERIFY_H */
