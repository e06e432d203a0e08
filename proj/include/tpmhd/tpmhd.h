/* C interface of the tpmhd solver library. */
#ifndef TPMHD_TPMHD_H
#define TPMHD_TPMHD_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define TPMHD_API __declspec(dllexport)
#else
#define TPMHD_API __attribute__((visibility("default")))
#endif

typedef enum tpmhd_status {
  TPMHD_OK = 0,
  TPMHD_ERR_CONFIG = 1,
  TPMHD_ERR_SOLVER = 2,
  TPMHD_ERR_IO = 3,
  TPMHD_ERR_ARGUMENT = 4,
  TPMHD_ERR_INTERNAL = 5
} tpmhd_status;

typedef struct tpmhd_config tpmhd_config;
typedef struct tpmhd_result tpmhd_result;

/* Receives one progress line per call; the string is valid only during the call. */
typedef void (*tpmhd_log_fn)(const char* line, void* user);

TPMHD_API const char* tpmhd_version(void);

/* Message of the last failed call on this thread, or "" when none. */
TPMHD_API const char* tpmhd_last_error(void);

TPMHD_API tpmhd_status tpmhd_config_load(const char* path, tpmhd_config** out);
TPMHD_API tpmhd_status tpmhd_config_parse(const char* text, tpmhd_config** out);
TPMHD_API void tpmhd_config_free(tpmhd_config* config);

/* "converge", "spinodal" or "kh". */
TPMHD_API const char* tpmhd_config_experiment(const tpmhd_config* config);
TPMHD_API tpmhd_status tpmhd_config_set_output_dir(tpmhd_config* config, const char* dir);

/* Runs the configured experiment and writes its outputs. On success *out
   (when not NULL) receives a result handle. */
TPMHD_API tpmhd_status tpmhd_run(const tpmhd_config* config, tpmhd_log_fn log, void* user, tpmhd_result** out);

TPMHD_API void tpmhd_result_free(tpmhd_result* result);

/* Path of the main CSV output. */
TPMHD_API const char* tpmhd_result_csv(const tpmhd_result* result);
TPMHD_API size_t tpmhd_result_dump_count(const tpmhd_result* result);
TPMHD_API const char* tpmhd_result_dump(const tpmhd_result* result, size_t index);

#ifdef __cplusplus
}
#endif

#endif
