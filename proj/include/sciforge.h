/* sciforge C API: scientific instruction-data curation pipeline.
 *
 * All functions return SCIFORGE_OK (0) on success or a nonzero error code;
 * sciforge_last_error() describes the most recent failure on the calling
 * thread. Strings returned through char** out-parameters are owned by the
 * caller and must be released with sciforge_string_free().
 */
#ifndef SCIFORGE_H
#define SCIFORGE_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SCIFORGE_API __declspec(dllexport)
#else
#define SCIFORGE_API __attribute__((visibility("default")))
#endif

/* Error codes. Validation covers malformed inputs, contract violations and
 * configuration mistakes; transport covers backend/network failures. */
#define SCIFORGE_OK 0
#define SCIFORGE_E_VALIDATION 1
#define SCIFORGE_E_TRANSPORT 2
#define SCIFORGE_E_IO 3
#define SCIFORGE_E_ARG 4

typedef struct sciforge_config sciforge_config;
typedef struct sciforge_classifier sciforge_classifier;

SCIFORGE_API const char *sciforge_version(void);

/* Message for the last error on this thread; empty string if none. The
 * pointer stays valid until the next failing call on the same thread. */
SCIFORGE_API const char *sciforge_last_error(void);

SCIFORGE_API void sciforge_string_free(char *s);

/* ------------------------------------------------------------------ */
/* Configuration. Precedence: load_file < load_env < set.             */

SCIFORGE_API sciforge_config *sciforge_config_create(void);
SCIFORGE_API void sciforge_config_destroy(sciforge_config *cfg);
SCIFORGE_API int sciforge_config_load_file(sciforge_config *cfg, const char *path);
SCIFORGE_API int sciforge_config_load_env(sciforge_config *cfg);
SCIFORGE_API int sciforge_config_set(sciforge_config *cfg, const char *key, const char *value);
SCIFORGE_API int sciforge_config_get(const sciforge_config *cfg, const char *key,
                                     char **value_out);

/* ------------------------------------------------------------------ */
/* Pipeline steps. Each reads the given inputs, writes every named     */
/* output atomically (pass NULL or "" to skip an optional output), and */
/* hands back a JSON report through report_out.                        */

/* Parse, deduplicate and screen a question corpus. */
SCIFORGE_API int sciforge_ingest(sciforge_config *cfg, const char *input_path,
                                 const char *clean_out, const char *quarantine_out,
                                 char **report_out);

/* Run the three-pass annotation funnel over a question corpus. A
 * checkpoint path makes the run resumable; completed records are not
 * re-sent to the backend. */
SCIFORGE_API int sciforge_annotate(sciforge_config *cfg, const char *questions_path,
                                   const char *solutions_out, const char *checkpoint_path,
                                   char **report_out);

/* Judge existing solutions against their records' reference answers. */
SCIFORGE_API int sciforge_label(sciforge_config *cfg, const char *questions_path,
                                const char *solutions_path, const char *verdicts_out,
                                char **report_out);

/* Train the linear quality filter on positive/negative example files. */
SCIFORGE_API int sciforge_train_filter(sciforge_config *cfg, const char *positives_path,
                                       const char *negatives_path, const char *model_out,
                                       char **report_out);

/* Score a dataset with a trained filter and drop the lowest fraction.
 * Pass drop_fraction < 0 to use the filter.drop_fraction config key. */
SCIFORGE_API int sciforge_score(sciforge_config *cfg, const char *model_path,
                                const char *dataset_path, double drop_fraction,
                                const char *kept_out, const char *dropped_out,
                                char **report_out);

/* Join questions with solutions into the final instruction dataset. */
SCIFORGE_API int sciforge_assemble(sciforge_config *cfg, const char *questions_path,
                                   const char *solutions_path, const char *dataset_out,
                                   const char *stats_out, char **report_out);

/* Per-subject counts of an assembled dataset, as JSON and as a table. */
SCIFORGE_API int sciforge_stats(sciforge_config *cfg, const char *dataset_path,
                                char **stats_json_out, char **stats_table_out);

/* Score benchmark responses and aggregate per task and task group. */
SCIFORGE_API int sciforge_eval(sciforge_config *cfg, const char *items_path,
                               const char *responses_path, const char *groups_path,
                               char **report_json_out, char **report_table_out);

/* Write the downstream fine-tuning recipe for the curated dataset. */
SCIFORGE_API int sciforge_emit_train_config(sciforge_config *cfg, const char *out_path,
                                            char **report_out);

/* ------------------------------------------------------------------ */
/* Quality classifier handles, for embedding the filter directly.     */

SCIFORGE_API int sciforge_classifier_train(sciforge_config *cfg, const char *positives_path,
                                           const char *negatives_path,
                                           sciforge_classifier **clf_out);
SCIFORGE_API int sciforge_classifier_load(const char *path, sciforge_classifier **clf_out);
SCIFORGE_API int sciforge_classifier_save(const sciforge_classifier *clf, const char *path);
SCIFORGE_API int sciforge_classifier_score(sciforge_config *cfg, const sciforge_classifier *clf,
                                           const char *text, double *score_out);
SCIFORGE_API void sciforge_classifier_destroy(sciforge_classifier *clf);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SCIFORGE_H */
