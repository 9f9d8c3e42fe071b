#ifndef UGLEARN_H
#define UGLEARN_H

/* Generated by cbindgen from uglearn-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible entry point.
 */
typedef enum UglStatus {
  UglStatus_Ok = 0,
  /**
   * A required pointer argument was null.
   */
  UglStatus_NullArgument = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  UglStatus_InvalidUtf8 = 2,
  /**
   * Input text failed to parse; see `ugl_last_error`.
   */
  UglStatus_SyntaxError = 3,
  /**
   * A token carried a tag missing from the lexicon.
   */
  UglStatus_UnknownTag = 4,
  /**
   * The sentence has no parse within the bounds.
   */
  UglStatus_NoParse = 5,
} UglStatus;

/**
 * Opaque grammar handle.
 */
typedef struct UglGrammar UglGrammar;

/**
 * Opaque lexicon handle.
 */
typedef struct UglLexicon UglLexicon;

/**
 * Opaque model-configuration handle.
 */
typedef struct UglModel UglModel;

/**
 * Opaque mother-daughter-pair table handle. Not thread-safe; confine each
 * handle to one thread.
 */
typedef struct UglTable UglTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *ugl_last_error(void);

/**
 * Library version as a static string; never freed.
 */
const char *ugl_version(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be a pointer previously returned by one of the `_save`,
 * `ugl_parse` or similar string-returning functions, not yet freed.
 */
void ugl_string_free(char *s);

/**
 * Parses a grammar from its textual form into a new handle.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum UglStatus ugl_grammar_parse(const char *text, struct UglGrammar **out);

/**
 * # Safety
 * `g` must be a handle from `ugl_grammar_parse` or `ugl_learn_sentence`,
 * not yet freed.
 */
void ugl_grammar_free(struct UglGrammar *g);

/**
 * Number of rules in the grammar; 0 for a null handle.
 *
 * # Safety
 * `g` must be a live grammar handle or null.
 */
uintptr_t ugl_grammar_size(const struct UglGrammar *g);

/**
 * Canonical textual form of the grammar; free with `ugl_string_free`.
 *
 * # Safety
 * `g` must be a live grammar handle.
 */
char *ugl_grammar_save(const struct UglGrammar *g);

/**
 * Parses a lexicon (`tag TAG Category` lines) into a new handle.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum UglStatus ugl_lexicon_parse(const char *text, struct UglLexicon **out);

/**
 * # Safety
 * `lex` must be a handle from `ugl_lexicon_parse`, not yet freed.
 */
void ugl_lexicon_free(struct UglLexicon *lex);

/**
 * Parses a model configuration (lp/semtype/hfc/xbar sections).
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum UglStatus ugl_model_parse(const char *text, struct UglModel **out);

/**
 * # Safety
 * `model` must be a handle from `ugl_model_parse`, not yet freed.
 */
void ugl_model_free(struct UglModel *model);

/**
 * Creates an empty frequency table with the given unseen-pair floor.
 */
struct UglTable *ugl_table_new(double epsilon);

/**
 * # Safety
 * `table` must be a handle from `ugl_table_new`, not yet freed.
 */
void ugl_table_free(struct UglTable *table);

/**
 * Adds the mother-daughter pairs of one bracketed tree to the table.
 *
 * # Safety
 * `table` must be a live table handle and `tree` a valid string.
 */
enum UglStatus ugl_table_train(struct UglTable *table, const char *tree);

/**
 * Scores one bracketed tree against the table.
 *
 * # Safety
 * All pointers must be valid; `score` receives the result on success.
 */
enum UglStatus ugl_table_score_tree(const struct UglTable *table, const char *tree, double *score);

/**
 * Table persistence format (`mother daughter count` lines plus a TOTAL
 * trailer); free with `ugl_string_free`.
 *
 * # Safety
 * `table` must be a live table handle.
 */
char *ugl_table_save(const struct UglTable *table);

/**
 * Parses a tag sequence. On success `out_trees` receives the bracketed
 * parses joined by newlines (free with `ugl_string_free`), `out_edges` the
 * number of edges built, and `out_halt` 0 for exhausted, 1 for the edge
 * bound, 2 for the parse bound. Returns `NoParse` when no tree exists
 * within the bounds; the out-parameters are still filled.
 *
 * # Safety
 * Handles must be live; `tags` must point to `n_tags` valid strings;
 * `start` may be null for the default `S[]`.
 */
enum UglStatus ugl_parse(const struct UglGrammar *grammar,
                         const struct UglLexicon *lexicon,
                         const char *const *tags,
                         uintptr_t n_tags,
                         const char *start,
                         uintptr_t max_parses,
                         uintptr_t max_edges,
                         bool complete,
                         bool use_unary,
                         char **out_trees,
                         uintptr_t *out_edges,
                         int *out_halt);

/**
 * Closeness of a bracketed test tree to a bracketed benchmark tree, with
 * an optional `from to`-per-line label map applied to both.
 *
 * # Safety
 * `test` and `bench` must be valid strings; `labelmap` may be null;
 * `score` must be a valid pointer.
 */
enum UglStatus ugl_closeness(const char *test,
                             const char *bench,
                             const char *labelmap,
                             double *score);

/**
 * Runs one interleaved parse-and-learn step over a tag sequence. The
 * grammar handle is not modified; `out_grammar` receives a new handle to
 * the (possibly extended) grammar. `out_verdict` is 0 when the grammar
 * already parsed the sentence, 1 when rules were learnt, 2 when every
 * instantiation was rejected. The table is trained in place when
 * data-driven learning is on.
 *
 * # Safety
 * Handles must be live; `tags` must point to `n_tags` valid strings;
 * `start` may be null for the default; output pointers must be valid.
 */
enum UglStatus ugl_learn_sentence(const struct UglGrammar *grammar,
                                  const struct UglLexicon *lexicon,
                                  const struct UglModel *model,
                                  struct UglTable *table,
                                  const char *const *tags,
                                  uintptr_t n_tags,
                                  const char *start,
                                  bool model_on,
                                  bool data_on,
                                  double theta,
                                  uintptr_t max_parses,
                                  uintptr_t max_edges,
                                  bool use_unary,
                                  struct UglGrammar **out_grammar,
                                  int *out_verdict);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UGLEARN_H */
