/* C interface to the warnrank library.
 *
 * Every call returns a wr_status; on failure wr_last_error() describes the
 * problem (the text is thread-local and valid until the next failing call on
 * the same thread). Strings returned through char** out-parameters are owned
 * by the caller and released with wr_string_free. Command results are JSON
 * objects whose "text" member holds a human-readable summary.
 */
#ifndef WARNRANK_WARNRANK_H
#define WARNRANK_WARNRANK_H

#if defined(WARNRANK_BUILDING_LIBRARY)
#define WR_API __attribute__((visibility("default")))
#else
#define WR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wr_status {
  WR_OK = 0,
  WR_E_INTERNAL = 1,
  WR_E_IO = 2,
  WR_E_CONFIG = 3,
  WR_E_LEX = 10,
  WR_E_PARSE = 11,
  WR_E_CFG = 12,
  WR_E_SDG = 13,
  WR_E_UNKNOWN_NODE = 14,
  WR_E_UNRESOLVED_WARNING = 15,
  WR_E_SCHEMA = 20,
  WR_E_DUPLICATE_WARNING = 21,
  WR_E_UNLABELED = 22,
  WR_E_CAPACITY = 30,
  WR_E_EMPTY_CORPUS = 31,
  WR_E_ALL_MASKED = 40,
  WR_E_EMPTY_LIST = 50,
  WR_E_NO_ACTUAL_TPS = 51,
  WR_E_TOO_FEW_SAMPLES = 52,
  WR_E_INVALID_ARGUMENT = 90
} wr_status;

typedef struct wr_config wr_config;
typedef struct wr_corpus wr_corpus;

WR_API const char* wr_version(void);
WR_API const char* wr_last_error(void);
WR_API const char* wr_status_name(wr_status status);
/* Nonzero when the status stems from the caller's input rather than a defect. */
WR_API int wr_status_is_user_error(wr_status status);
/* "trace", "debug", "info", "warn", "error" or "off". */
WR_API wr_status wr_set_log_level(const char* level);
WR_API void wr_string_free(char* s);

/* Configuration: defaults, then an INI file and/or "section.key=value" overrides. */
WR_API wr_status wr_config_new(wr_config** out);
WR_API wr_status wr_config_load(wr_config* cfg, const char* path);
WR_API wr_status wr_config_set(wr_config* cfg, const char* assignment);
WR_API wr_status wr_config_get(const wr_config* cfg, const char* key, char** out);
WR_API wr_status wr_config_to_ini(const wr_config* cfg, char** out);
WR_API void wr_config_free(wr_config* cfg);

/* A parsed corpus with its dependence graph. */
WR_API wr_status wr_corpus_open(const char* dir, wr_corpus** out);
WR_API wr_status wr_corpus_slice(const wr_corpus* corpus, const char* file, int line, const char* mode, char** out_json);
WR_API wr_status wr_corpus_edges(const wr_corpus* corpus, char** out_text);
WR_API void wr_corpus_free(wr_corpus* corpus);

/* Pipeline commands; artifacts are written under run.output_dir. */
WR_API wr_status wr_synth(const wr_config* cfg, char** out_json);
WR_API wr_status wr_prepare(const wr_config* cfg, int compare_abstraction, char** out_json);
WR_API wr_status wr_train_embed(const wr_config* cfg, char** out_json);
WR_API wr_status wr_train(const wr_config* cfg, int resume, char** out_json);
/* model_dir may be NULL: the model is read from run.output_dir. */
WR_API wr_status wr_rank(const wr_config* cfg, const char* model_dir, char** out_json);
WR_API wr_status wr_eval(const wr_config* cfg, int save_checkpoints, char** out_json);
WR_API wr_status wr_ablate(const wr_config* cfg, int save_checkpoints, char** out_json);

#ifdef __cplusplus
}
#endif

#endif
