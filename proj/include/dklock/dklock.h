// Copyright 2026 The dklock Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/*
 * dklock C API.
 *
 * Simulator for double-key-lock (scramble/retrieve) Ramsey memories. All
 * frequencies are angular (rad/s) and all times are seconds unless a name
 * says otherwise. Every function returns a dkl_status; on failure the
 * thread-local message from dkl_last_error() describes it. Handles are
 * opaque and owned by the caller, who releases them with the matching
 * *_destroy function. Strings returned through char** are released with
 * dkl_string_free.
 */
#ifndef DKLOCK_DKLOCK_H
#define DKLOCK_DKLOCK_H

#include <stddef.h>
#include <stdint.h>

#if defined(DKLOCK_BUILDING_LIBRARY)
#define DKL_API __attribute__((visibility("default")))
#else
#define DKL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dkl_status {
    DKL_OK = 0,
    DKL_ERR_INVALID_ARGUMENT = 1,
    DKL_ERR_INVALID_FIELD = 2,
    DKL_ERR_INVALID_DURATION = 3,
    DKL_ERR_DEGRADED_STATE = 4,
    DKL_ERR_INVALID_SEQUENCE = 5,
    DKL_ERR_NO_PRECESSION = 6,
    DKL_ERR_PLAN_MISMATCH = 7,
    DKL_ERR_INFEASIBLE = 8,
    DKL_ERR_FIT = 9,
    DKL_ERR_CONFIG_SYNTAX = 10,
    DKL_ERR_CONFIG_REFERENCE = 11,
    DKL_ERR_CONFIG_MISSING = 12,
    DKL_ERR_IO = 13,
    DKL_ERR_INTERNAL = 14
} dkl_status;

typedef enum dkl_frame { DKL_FRAME_ROTATING = 0, DKL_FRAME_LAB = 1 } dkl_frame;

typedef struct dkl_sequence dkl_sequence;
typedef struct dkl_scan dkl_scan;
typedef struct dkl_config dkl_config;

typedef struct dkl_field {
    double rabi;
    double detuning;
} dkl_field;

/* Amplitudes c_g and c_e as (re, im) pairs. */
typedef struct dkl_state {
    double g_re, g_im, e_re, e_im;
} dkl_state;

typedef struct dkl_fit_result {
    double amplitude;
    double frequency_hz;
    double phase_rad;
    double offset;
    double decay_s; /* +inf when undamped */
    double rms_residual;
    double residual_threshold;
    int converged;
} dkl_fit_result;

typedef struct dkl_double_plan {
    int64_t m, n;
    double t2, t3, t4;
    double tau_s2;
    int clock_during_pulses;
} dkl_double_plan;

/* Optional overrides for dkl_run. NULL strings / negative values keep the
 * config's setting. */
typedef struct dkl_run_overrides {
    const char *protocol;
    const char *grid;
    int has_seed;
    uint64_t seed;
    int64_t sweep_phis;      /* < 0: keep */
    int clock_during_pulses; /* < 0: keep, 0: off, 1: on */
    const char *input_csv;   /* scan to fit for protocol "fit" */
} dkl_run_overrides;

DKL_API const char *dkl_version(void);
DKL_API const char *dkl_last_error(void);
DKL_API const char *dkl_status_string(dkl_status status);
DKL_API void dkl_string_free(char *s);

/* Two-level dynamics. `out` receives 8 doubles: row-major (re, im) pairs. */
DKL_API dkl_status dkl_effective_rabi(const dkl_field *field, double *out);
DKL_API dkl_status dkl_pulse_unitary(const dkl_field *field, double tau, double phi, double out[8]);
DKL_API dkl_status dkl_free_unitary(dkl_frame frame, double omega_a, double t, double out[8]);
DKL_API dkl_status dkl_closed_form_ramsey(const dkl_field *field, double tau, double interval, double *out);
DKL_API dkl_status dkl_excitation_probability(const dkl_state *state, double *out);

/* Sequences. */
DKL_API dkl_status dkl_sequence_create(dkl_frame frame, double omega_a, int clock_during_pulses, dkl_sequence **out);
DKL_API void dkl_sequence_destroy(dkl_sequence *seq);
DKL_API dkl_status dkl_sequence_add_pulse(dkl_sequence *seq, const dkl_field *field, double tau, double phase_offset);
/* scan_variable != 0 marks the wait substituted by dkl_sequence_scan. */
DKL_API dkl_status dkl_sequence_add_wait(dkl_sequence *seq, double duration, int scan_variable);
DKL_API dkl_status dkl_sequence_evolve(const dkl_sequence *seq, const dkl_state *initial, dkl_state *out);
DKL_API dkl_status dkl_sequence_scan(const dkl_sequence *seq, const double *grid, size_t count, dkl_scan **out);

/* Scans. */
DKL_API void dkl_scan_destroy(dkl_scan *scan);
DKL_API size_t dkl_scan_size(const dkl_scan *scan);
DKL_API dkl_status dkl_scan_point(const dkl_scan *scan, size_t index, double *T, double *p, double *sd);
DKL_API dkl_status dkl_scan_fit(const dkl_scan *scan, dkl_fit_result *out);
DKL_API dkl_status dkl_scan_visibility(const dkl_scan *scan, double *out);
DKL_API dkl_status dkl_scan_to_csv(const dkl_scan *scan, char **out);

/* Planners. */
DKL_API dkl_status dkl_plan_readout(double delta_w, int64_t k, double *out);
DKL_API dkl_status dkl_plan_retrieval(double delta_s, double min_t2, int64_t *n, double *t2);
DKL_API dkl_status dkl_plan_double_retrieval(double delta_s1, double delta_s2, double tau_s2, double min_t3,
                                             double min_t2_plus_t4, int clock_during_pulses, dkl_double_plan *out);

/* Experiment configs and the protocol runner. */
DKL_API dkl_status dkl_config_parse(const char *text, dkl_config **out);
DKL_API dkl_status dkl_config_load(const char *path, dkl_config **out);
DKL_API void dkl_config_destroy(dkl_config *config);
DKL_API dkl_status dkl_config_serialize(const dkl_config *config, char **out);
/* Runs the configured protocol. `csv` receives the output (possibly empty),
 * `exit_code` the process exit code: 0 ok, 2 config error, 3 planner
 * infeasible, 4 fit not converged, 1 anything else. The status is DKL_OK
 * whenever the run itself was attempted. */
DKL_API dkl_status dkl_run(const dkl_config *config, const dkl_run_overrides *overrides, char **csv, int *exit_code);

#ifdef __cplusplus
}
#endif

#endif
