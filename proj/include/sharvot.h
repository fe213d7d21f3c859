/* C interface to the sharvot election toolkit.
 *
 * All functions returning sharvot_status set a thread-local error message
 * retrievable with sharvot_last_error().  Strings returned through char**
 * out-parameters are heap-allocated and must be released with
 * sharvot_free(); strings returned as const char* are owned by their
 * handle and live until the handle is freed.
 */
#ifndef SHARVOT_H
#define SHARVOT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  SHARVOT_OK = 0,
  SHARVOT_ERR_INVALID_ARGUMENT = 1, /* bad pointer, bad config value */
  SHARVOT_ERR_PARSE = 2,            /* malformed hex/JSON/script bytes */
  SHARVOT_ERR_PROTOCOL = 3,         /* a protocol round refused to complete */
  SHARVOT_ERR_STATE = 4,            /* call sequence violation */
} sharvot_status;

const char* sharvot_last_error(void);
void sharvot_free(void* p);

/* ---- elections ---------------------------------------------------- */

typedef struct sharvot_election sharvot_election;

/* Validates the JSON config (same schema as the CLI) and builds a handle. */
sharvot_status sharvot_election_create(const char* config_json,
                                       sharvot_election** out);
void sharvot_election_free(sharvot_election* e);

/* Overrides the config's seed before running. */
sharvot_status sharvot_election_set_seed(sharvot_election* e, uint64_t seed);

/* Runs the whole protocol; idempotent calls after success are errors. */
sharvot_status sharvot_election_run(sharvot_election* e);

/* Valid after a successful run. */
const char* sharvot_election_outcome(const sharvot_election* e); /* "winner","refund","abort" */
const char* sharvot_election_winner(const sharvot_election* e);  /* NULL unless outcome=="winner" */
const char* sharvot_election_transcript(const sharvot_election* e); /* JSON document */

/* ---- standalone shuffle ------------------------------------------- */

/* Shuffles n byte strings through a full ring session.  Returns a JSON
 * report {inputs, outputs, hops} with hex payloads via *json_out. */
sharvot_status sharvot_shuffle_run(const uint8_t* const* items,
                                   const size_t* lens, size_t n,
                                   uint64_t seed, char** json_out);

/* ---- script inspection -------------------------------------------- */

/* Disassembles a hex-encoded script; when the script has the vote-ladder
 * layout the report also lists each statement's metadata slots and keys. */
sharvot_status sharvot_script_inspect(const char* hex, char** report_out);

#ifdef __cplusplus
}
#endif

#endif /* SHARVOT_H */
