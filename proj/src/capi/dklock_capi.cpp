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

#include "dklock/dklock.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "core/analysis.hpp"
#include "core/config.hpp"
#include "core/protocol.hpp"
#include "core/runner.hpp"
#include "core/sequence.hpp"

struct dkl_sequence {
    dklock::Sequence seq;
};

struct dkl_scan {
    dklock::FringeScan scan;
};

struct dkl_config {
    dklock::ExperimentConfig config;
};

namespace {

thread_local std::string last_error;

dkl_status status_for(dklock::ErrorCode code) {
    using dklock::ErrorCode;
    switch (code) {
        case ErrorCode::invalid_argument:
            return DKL_ERR_INVALID_ARGUMENT;
        case ErrorCode::invalid_field:
            return DKL_ERR_INVALID_FIELD;
        case ErrorCode::invalid_duration:
            return DKL_ERR_INVALID_DURATION;
        case ErrorCode::degraded_state:
            return DKL_ERR_DEGRADED_STATE;
        case ErrorCode::invalid_sequence:
            return DKL_ERR_INVALID_SEQUENCE;
        case ErrorCode::no_precession:
            return DKL_ERR_NO_PRECESSION;
        case ErrorCode::plan_mismatch:
            return DKL_ERR_PLAN_MISMATCH;
        case ErrorCode::infeasible:
            return DKL_ERR_INFEASIBLE;
        case ErrorCode::fit_failure:
            return DKL_ERR_FIT;
        case ErrorCode::config_syntax:
            return DKL_ERR_CONFIG_SYNTAX;
        case ErrorCode::config_reference:
            return DKL_ERR_CONFIG_REFERENCE;
        case ErrorCode::config_missing:
            return DKL_ERR_CONFIG_MISSING;
        case ErrorCode::io:
            return DKL_ERR_IO;
    }
    return DKL_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into status codes.
template <typename Body>
dkl_status guarded(Body &&body) {
    try {
        body();
        last_error.clear();
        return DKL_OK;
    } catch (const dklock::Error &e) {
        last_error = e.what();
        return status_for(e.code());
    } catch (const std::exception &e) {
        last_error = e.what();
        return DKL_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown failure";
        return DKL_ERR_INTERNAL;
    }
}

dkl_status null_argument(const char *name) {
    last_error = std::string("null argument: ") + name;
    return DKL_ERR_INVALID_ARGUMENT;
}

dklock::FieldParams to_field(const dkl_field &f) { return {f.rabi, f.detuning, ""}; }

void store(const dklock::Unitary2 &u, double out[8]) {
    for (int k = 0; k < 4; k++) {
        out[2 * k] = u.m[k].real();
        out[2 * k + 1] = u.m[k].imag();
    }
}

char *copy_string(const std::string &s) {
    auto *buf = static_cast<char *>(std::malloc(s.size() + 1));
    if (buf == nullptr) {
        throw std::bad_alloc();
    }
    std::memcpy(buf, s.data(), s.size());
    buf[s.size()] = '\0';
    return buf;
}

}  // namespace

extern "C" {

const char *dkl_version(void) { return "1.0.0"; }

const char *dkl_last_error(void) { return last_error.c_str(); }

const char *dkl_status_string(dkl_status status) {
    switch (status) {
        case DKL_OK:
            return "ok";
        case DKL_ERR_INVALID_ARGUMENT:
            return "invalid argument";
        case DKL_ERR_INVALID_FIELD:
            return "invalid field";
        case DKL_ERR_INVALID_DURATION:
            return "invalid duration";
        case DKL_ERR_DEGRADED_STATE:
            return "degraded state";
        case DKL_ERR_INVALID_SEQUENCE:
            return "invalid sequence";
        case DKL_ERR_NO_PRECESSION:
            return "no precession";
        case DKL_ERR_PLAN_MISMATCH:
            return "plan mismatch";
        case DKL_ERR_INFEASIBLE:
            return "infeasible";
        case DKL_ERR_FIT:
            return "fit failure";
        case DKL_ERR_CONFIG_SYNTAX:
            return "config syntax error";
        case DKL_ERR_CONFIG_REFERENCE:
            return "config dangling reference";
        case DKL_ERR_CONFIG_MISSING:
            return "config missing statement";
        case DKL_ERR_IO:
            return "i/o error";
        case DKL_ERR_INTERNAL:
            return "internal error";
    }
    return "unknown status";
}

void dkl_string_free(char *s) { std::free(s); }

dkl_status dkl_effective_rabi(const dkl_field *field, double *out) {
    if (field == nullptr || out == nullptr) {
        return null_argument("field/out");
    }
    return guarded([&] { *out = dklock::effective_rabi(to_field(*field)); });
}

dkl_status dkl_pulse_unitary(const dkl_field *field, double tau, double phi, double out[8]) {
    if (field == nullptr || out == nullptr) {
        return null_argument("field/out");
    }
    return guarded([&] { store(dklock::pulse_unitary(to_field(*field), tau, phi), out); });
}

dkl_status dkl_free_unitary(dkl_frame frame, double omega_a, double t, double out[8]) {
    if (out == nullptr) {
        return null_argument("out");
    }
    return guarded([&] {
        auto conv = frame == DKL_FRAME_LAB ? dklock::FrameConvention::lab(omega_a) : dklock::FrameConvention::rotating();
        store(dklock::free_unitary(conv, t), out);
    });
}

dkl_status dkl_closed_form_ramsey(const dkl_field *field, double tau, double interval, double *out) {
    if (field == nullptr || out == nullptr) {
        return null_argument("field/out");
    }
    return guarded([&] { *out = dklock::closed_form_ramsey(to_field(*field), tau, interval); });
}

dkl_status dkl_excitation_probability(const dkl_state *state, double *out) {
    if (state == nullptr || out == nullptr) {
        return null_argument("state/out");
    }
    return guarded([&] {
        dklock::SpinState s{{state->g_re, state->g_im}, {state->e_re, state->e_im}};
        *out = dklock::excitation_probability(s);
    });
}

dkl_status dkl_sequence_create(dkl_frame frame, double omega_a, int clock_during_pulses, dkl_sequence **out) {
    if (out == nullptr) {
        return null_argument("out");
    }
    return guarded([&] {
        auto h = std::make_unique<dkl_sequence>();
        if (frame == DKL_FRAME_LAB) {
            h->seq.frame = dklock::FrameConvention::lab(omega_a);
        }
        h->seq.clock_during_pulses = clock_during_pulses != 0;
        *out = h.release();
    });
}

void dkl_sequence_destroy(dkl_sequence *seq) { delete seq; }

dkl_status dkl_sequence_add_pulse(dkl_sequence *seq, const dkl_field *field, double tau, double phase_offset) {
    if (seq == nullptr || field == nullptr) {
        return null_argument("seq/field");
    }
    return guarded([&] { seq->seq.pulse(to_field(*field), tau, phase_offset); });
}

dkl_status dkl_sequence_add_wait(dkl_sequence *seq, double duration, int scan_variable) {
    if (seq == nullptr) {
        return null_argument("seq");
    }
    return guarded([&] {
        if (scan_variable != 0) {
            seq->seq.scan_wait(duration);
        } else {
            seq->seq.wait(duration);
        }
    });
}

dkl_status dkl_sequence_evolve(const dkl_sequence *seq, const dkl_state *initial, dkl_state *out) {
    if (seq == nullptr || initial == nullptr || out == nullptr) {
        return null_argument("seq/initial/out");
    }
    return guarded([&] {
        dklock::SpinState s{{initial->g_re, initial->g_im}, {initial->e_re, initial->e_im}};
        dklock::SpinState r = dklock::evolve(seq->seq, s);
        *out = {r.g.real(), r.g.imag(), r.e.real(), r.e.imag()};
    });
}

dkl_status dkl_sequence_scan(const dkl_sequence *seq, const double *grid, size_t count, dkl_scan **out) {
    if (seq == nullptr || out == nullptr || (grid == nullptr && count > 0)) {
        return null_argument("seq/grid/out");
    }
    return guarded([&] {
        auto h = std::make_unique<dkl_scan>();
        h->scan = dklock::scan(seq->seq, std::span<const double>(grid, count));
        *out = h.release();
    });
}

void dkl_scan_destroy(dkl_scan *scan) { delete scan; }

size_t dkl_scan_size(const dkl_scan *scan) { return scan == nullptr ? 0 : scan->scan.size(); }

dkl_status dkl_scan_point(const dkl_scan *scan, size_t index, double *T, double *p, double *sd) {
    if (scan == nullptr) {
        return null_argument("scan");
    }
    if (index >= scan->scan.size()) {
        last_error = "scan index out of range";
        return DKL_ERR_INVALID_ARGUMENT;
    }
    const auto &pt = scan->scan.points[index];
    if (T != nullptr) {
        *T = pt.T;
    }
    if (p != nullptr) {
        *p = pt.p;
    }
    if (sd != nullptr) {
        *sd = pt.sd;
    }
    return DKL_OK;
}

dkl_status dkl_scan_fit(const dkl_scan *scan, dkl_fit_result *out) {
    if (scan == nullptr || out == nullptr) {
        return null_argument("scan/out");
    }
    return guarded([&] {
        dklock::FitResult f = dklock::fit_damped_sinusoid(scan->scan);
        *out = {f.amplitude,    f.frequency,          f.phase,         f.offset, f.decay_time,
                f.rms_residual, f.residual_threshold, f.converged ? 1 : 0};
    });
}

dkl_status dkl_scan_visibility(const dkl_scan *scan, double *out) {
    if (scan == nullptr || out == nullptr) {
        return null_argument("scan/out");
    }
    return guarded([&] { *out = dklock::fringe_visibility(scan->scan); });
}

dkl_status dkl_scan_to_csv(const dkl_scan *scan, char **out) {
    if (scan == nullptr || out == nullptr) {
        return null_argument("scan/out");
    }
    return guarded([&] { *out = copy_string(dklock::scan_to_csv(scan->scan)); });
}

dkl_status dkl_plan_readout(double delta_w, int64_t k, double *out) {
    if (out == nullptr) {
        return null_argument("out");
    }
    return guarded([&] { *out = dklock::plan_readout(delta_w, k); });
}

dkl_status dkl_plan_retrieval(double delta_s, double min_t2, int64_t *n, double *t2) {
    if (n == nullptr || t2 == nullptr) {
        return null_argument("n/t2");
    }
    return guarded([&] {
        auto plan = dklock::plan_retrieval(delta_s, min_t2);
        *n = plan.n;
        *t2 = plan.T2;
    });
}

dkl_status dkl_plan_double_retrieval(double delta_s1, double delta_s2, double tau_s2, double min_t3,
                                     double min_t2_plus_t4, int clock_during_pulses, dkl_double_plan *out) {
    if (out == nullptr) {
        return null_argument("out");
    }
    return guarded([&] {
        auto p = dklock::plan_double_retrieval(delta_s1, delta_s2, tau_s2, min_t3, min_t2_plus_t4,
                                               clock_during_pulses != 0);
        *out = {p.m, p.n, p.T2, p.T3, p.T4, p.tau_s2, p.clock_during_pulses ? 1 : 0};
    });
}

dkl_status dkl_config_parse(const char *text, dkl_config **out) {
    if (text == nullptr || out == nullptr) {
        return null_argument("text/out");
    }
    return guarded([&] {
        auto h = std::make_unique<dkl_config>();
        h->config = dklock::parse_config(text);
        *out = h.release();
    });
}

dkl_status dkl_config_load(const char *path, dkl_config **out) {
    if (path == nullptr || out == nullptr) {
        return null_argument("path/out");
    }
    return guarded([&] {
        auto h = std::make_unique<dkl_config>();
        h->config = dklock::load_config(path);
        *out = h.release();
    });
}

void dkl_config_destroy(dkl_config *config) { delete config; }

dkl_status dkl_config_serialize(const dkl_config *config, char **out) {
    if (config == nullptr || out == nullptr) {
        return null_argument("config/out");
    }
    return guarded([&] { *out = copy_string(dklock::serialize_config(config->config)); });
}

dkl_status dkl_run(const dkl_config *config, const dkl_run_overrides *overrides, char **csv, int *exit_code) {
    if (config == nullptr || csv == nullptr || exit_code == nullptr) {
        return null_argument("config/csv/exit_code");
    }
    dklock::RunOverrides ov;
    dkl_status parsed = guarded([&] {
        if (overrides == nullptr) {
            return;
        }
        if (overrides->protocol != nullptr) {
            ov.protocol = dklock::protocol_from_name(overrides->protocol);
            if (!ov.protocol) {
                throw dklock::Error(dklock::ErrorCode::config_syntax,
                                    std::string("unknown protocol '") + overrides->protocol + "'");
            }
        }
        if (overrides->grid != nullptr) {
            ov.grid = dklock::parse_grid(overrides->grid);
        }
        if (overrides->has_seed != 0) {
            ov.seed = overrides->seed;
        }
        if (overrides->sweep_phis >= 0) {
            ov.sweep_phis = overrides->sweep_phis;
        }
        if (overrides->clock_during_pulses >= 0) {
            ov.clock_during_pulses = overrides->clock_during_pulses != 0;
        }
        if (overrides->input_csv != nullptr) {
            ov.input_csv = std::string(overrides->input_csv);
        }
    });
    if (parsed != DKL_OK) {
        *csv = nullptr;
        *exit_code = dklock::kExitConfig;
        return DKL_OK;  // last_error keeps the override problem
    }
    std::string message;
    dkl_status status = guarded([&] {
        dklock::RunResult r = dklock::run(config->config, ov);
        *csv = copy_string(r.csv);
        *exit_code = r.exit_code;
        message = std::move(r.message);
    });
    if (status != DKL_OK) {
        *csv = nullptr;
        *exit_code = dklock::kExitFailure;
        return status;
    }
    last_error = message;
    return DKL_OK;
}

}  // extern "C"
