#ifndef DRYFRIC_DRYFRIC_H
#define DRYFRIC_DRYFRIC_H

#include <stddef.h>
#include <stdint.h>

#if defined(DRYFRIC_BUILDING_LIBRARY)
#define DRYFRIC_API __attribute__((visibility("default")))
#else
#define DRYFRIC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. 2, 3 and 4 double as the CLI exit codes. */
typedef enum dryfric_status {
  DRYFRIC_OK = 0,
  DRYFRIC_INVALID_ARGUMENT = 1,
  DRYFRIC_CONFIG_ERROR = 2,
  DRYFRIC_RESOURCE_REFUSED = 3,
  DRYFRIC_NUMERIC_FAILURE = 4,
  DRYFRIC_IO_ERROR = 5,
  DRYFRIC_INTERNAL_ERROR = 6
} dryfric_status;

typedef struct dryfric_config dryfric_config;

DRYFRIC_API const char* dryfric_version(void);

/* Message of the last failed call on this thread; empty after a success. */
DRYFRIC_API const char* dryfric_last_error(void);

/* Configuration handles. `json` may be NULL or "" for all defaults. */
DRYFRIC_API dryfric_status dryfric_config_from_json(const char* json, dryfric_config** out);
DRYFRIC_API dryfric_status dryfric_config_from_file(const char* path, dryfric_config** out);
DRYFRIC_API void dryfric_config_free(dryfric_config* cfg);

/* "key=value"; the value is parsed as JSON when possible. Revalidates. */
DRYFRIC_API dryfric_status dryfric_config_override(dryfric_config* cfg, const char* assignment);

/* Copies the config hash (16 hex digits plus NUL) into buf. */
DRYFRIC_API dryfric_status dryfric_config_hash(const dryfric_config* cfg, char* buf, size_t len);

/* Runs a subcommand: simulate, solve, durations, psd, extrapolate, kappa.
   When summary is non-NULL the human readable report is copied into it,
   truncated to len bytes. */
DRYFRIC_API dryfric_status dryfric_run(const dryfric_config* cfg, const char* command, char* summary,
                                       size_t len);

/* Invariant mass of |eta| <= mu_s for the forcing chain of cfg. */
DRYFRIC_API dryfric_status dryfric_band_mass(const dryfric_config* cfg, double* out);

/* S1..S4 (stick probability, E[v^2], P(|eta| <= mu_s), E[eta^2]) as
   lambda u_lambda at s+ on the grid with refinement p. */
DRYFRIC_API dryfric_status dryfric_stationary_det(const dryfric_config* cfg, int p, double lambda,
                                                  double out[4]);

/* S1..S4 from n excursions with the cfg seed; stderr_out may be NULL. */
DRYFRIC_API dryfric_status dryfric_stationary_mc(const dryfric_config* cfg, uint64_t n, double out[4],
                                                 double stderr_out[4]);

/* P_stick from the mean exit time systems. */
DRYFRIC_API dryfric_status dryfric_p_stick(const dryfric_config* cfg, int p, double* out);

#ifdef __cplusplus
}
#endif

#endif
