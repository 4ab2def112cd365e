#ifndef RELCOR_H
#define RELCOR_H

#pragma once

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RelcorStatus {
  RELCOR_STATUS_OK = 0,
  RELCOR_STATUS_NULL_ARGUMENT = 1,
  RELCOR_STATUS_INVALID_UTF8 = 2,
  RELCOR_STATUS_SYNTAX = 3,
  RELCOR_STATUS_INVALID_SPEC = 4,
  RELCOR_STATUS_SPACE_MISMATCH = 5,
  RELCOR_STATUS_CAPACITY = 6,
  RELCOR_STATUS_NO_TESTS = 7,
  RELCOR_STATUS_IO = 8,
  RELCOR_STATUS_MALFORMED = 9,
  RELCOR_STATUS_PANIC = 10,
} RelcorStatus;

/**
 * A parsed program.
 */
typedef struct RelcorProgram RelcorProgram;

/**
 * A specification.
 */
typedef struct RelcorSpec RelcorSpec;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. Owned by the
 * library and valid until the next failing call on the same thread.
 */
const char *relcor_last_error(void);

/**
 * Library version, statically allocated.
 */
const char *relcor_version(void);

/**
 * Accepts null.
 */
void relcor_string_free(char *s);

enum RelcorStatus relcor_program_parse(const char *source, struct RelcorProgram **out);

/**
 * Accepts null.
 */
void relcor_program_free(struct RelcorProgram *p);

/**
 * Canonical source text of `p`.
 */
enum RelcorStatus relcor_program_text(const struct RelcorProgram *p, char **out);

enum RelcorStatus relcor_spec_from_json(const char *json, struct RelcorSpec **out);

/**
 * Accepts null.
 */
void relcor_spec_free(struct RelcorSpec *s);

/**
 * Size of the competence domain of `p` with respect to `spec`, computed
 * exactly over the finite space.
 */
enum RelcorStatus relcor_competence_domain_size(const struct RelcorSpec *spec,
                                                const struct RelcorProgram *p,
                                                size_t *out);

enum RelcorStatus relcor_is_correct(const struct RelcorSpec *spec,
                                    const struct RelcorProgram *p,
                                    bool *out);

/**
 * Whether `candidate` is (strictly, if `strict`) more-correct than `base`.
 */
enum RelcorStatus relcor_more_correct(const struct RelcorSpec *spec,
                                      const struct RelcorProgram *candidate,
                                      const struct RelcorProgram *base,
                                      bool strict,
                                      bool *out);

/**
 * Number of single-site mutants for a comma-separated operator list such
 * as `"aorb,lit,idx"`.
 */
enum RelcorStatus relcor_mutant_count(const struct RelcorProgram *p,
                                      const char *operators,
                                      size_t *out);

/**
 * Runs the repair search and returns the tree as JSON. `config_json` may be
 * null for the default configuration.
 */
enum RelcorStatus relcor_repair(const struct RelcorSpec *spec,
                                const struct RelcorProgram *p,
                                const char *config_json,
                                char **out);

/**
 * Runs a bundled case study (`lattice`, `arraysum` or `fermat`) and returns
 * its report as JSON. `ok` receives whether every expected fact held.
 */
enum RelcorStatus relcor_study_run(const char *name, bool *ok, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RELCOR_H */
