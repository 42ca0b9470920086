#ifndef LOSS_LOSS_H
#define LOSS_LOSS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(LOSS_BUILDING)
#    define LOSS_API __declspec(dllexport)
#  else
#    define LOSS_API __declspec(dllimport)
#  endif
#else
#  define LOSS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Every fallible call returns one; details via loss_last_error(). */
typedef enum loss_status {
    LOSS_OK = 0,
    LOSS_E_USAGE = 1,
    LOSS_E_CONFIG = 2,
    LOSS_E_IO = 3,
    LOSS_E_NUMERIC = 4,
    LOSS_E_HORIZON = 5,
    LOSS_E_LAYOUT = 6,
    LOSS_E_EXCHANGE = 7,
    LOSS_E_DOMAIN = 8,
    LOSS_E_DIMENSION = 9,
    LOSS_E_INTERNAL = 99
} loss_status;

typedef struct loss_scenario loss_scenario;
typedef struct loss_simulation loss_simulation;
typedef struct loss_snapshot loss_snapshot;

typedef struct loss_metrics {
    double e2;
    double einf;
    double norm;
} loss_metrics;

typedef struct loss_sim_info {
    int step;
    int n_steps;
    double time;
    double dt;
    uint64_t messages;
    uint64_t messages_per_step;
    int workers;
} loss_sim_info;

LOSS_API const char* loss_version(void);
/* Short class name of a status ("config", "io", ...). */
LOSS_API const char* loss_status_name(int status);
/* Message of the last failure on the calling thread; empty after success. */
LOSS_API const char* loss_last_error(void);
/* Frees strings returned through char** out parameters. */
LOSS_API void loss_free_string(char* s);

/* Scenarios */
LOSS_API int loss_scenario_load(const char* path, loss_scenario** out);
LOSS_API int loss_scenario_parse(const char* text, const char* source_name, loss_scenario** out);
/* Overrides one key; the scenario is left untouched when the result is invalid. */
LOSS_API int loss_scenario_set(loss_scenario* s, const char* key, const char* value);
/* Applies "key=value" overrides together and validates once at the end; all or nothing. */
LOSS_API int loss_scenario_set_many(loss_scenario* s, const char* const* assignments, int n);
/* Canonical key = value text; parsing it yields the same scenario. */
LOSS_API int loss_scenario_dump(const loss_scenario* s, char** out);
/* LOSS_WORKERS, else min(patches, hardware threads); 1 when deterministic. */
LOSS_API int loss_scenario_default_workers(const loss_scenario* s, int deterministic);
LOSS_API void loss_scenario_free(loss_scenario* s);

/* Stepping. workers <= 0 picks the default. */
LOSS_API int loss_simulation_create(const loss_scenario* s, int workers, loss_simulation** out);
LOSS_API int loss_simulation_advance(loss_simulation* sim, int steps);
LOSS_API int loss_simulation_info(const loss_simulation* sim, loss_sim_info* out);
LOSS_API int loss_simulation_snapshot(const loss_simulation* sim, const char* field, loss_snapshot** out);
/* Newline separated warnings (possibly empty). */
LOSS_API int loss_simulation_warnings(const loss_simulation* sim, char** out);
LOSS_API void loss_simulation_free(loss_simulation* sim);

/* Whole runs. Snapshots go to out_dir as <field>_<instant index, 4 digits>.snap; the report is
   key = value text (steps, messages, seconds, files, warnings). */
LOSS_API int loss_run(const loss_scenario* s, int workers, const char* out_dir, char** report);
/* Spectral reference at the output instants, resampled to the scenario's knots; same file naming. */
LOSS_API int loss_oracle(const loss_scenario* s, const char* out_dir, char** report);

/* Snapshots */
LOSS_API int loss_snapshot_read(const char* path, loss_snapshot** out);
LOSS_API int loss_snapshot_write(const loss_snapshot* snap, const char* path);
/* Builds a snapshot; data holds the product of dims values, row-major, last axis fastest. */
LOSS_API int loss_snapshot_create(const char* name, int ndim, const uint64_t* dims, const double* min,
                                  const double* max, double time, const double* data, loss_snapshot** out);
LOSS_API int loss_snapshot_ndim(const loss_snapshot* snap);
LOSS_API uint64_t loss_snapshot_dim(const loss_snapshot* snap, int axis);
LOSS_API double loss_snapshot_time(const loss_snapshot* snap);
LOSS_API const char* loss_snapshot_name(const loss_snapshot* snap);
LOSS_API const double* loss_snapshot_data(const loss_snapshot* snap, size_t* count);
LOSS_API void loss_snapshot_free(loss_snapshot* snap);

/* Harness */
LOSS_API int loss_compare(const loss_snapshot* num, const loss_snapshot* ref, loss_metrics* out);
/* Convergence table (CSV with # header and footer lines). */
LOSS_API int loss_sweep(const loss_scenario* s, const int* grids, int n_grids, const char* field, int workers,
                        char** table);
/* knob: "L", "R" or "k_max". */
LOSS_API int loss_pml_study(const loss_scenario* s, const char* knob, const double* values, int n_values,
                            const char* field, int workers, char** table);
/* Reads the snapshot files, orders them by time and extracts the line ("z:0,0") as CSV. */
LOSS_API int loss_trace(const char* const* paths, int n_paths, const char* line, char** csv);

#ifdef __cplusplus
}
#endif

#endif
