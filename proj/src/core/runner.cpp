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

#include "core/runner.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dklock {

namespace {

constexpr uint64_t kPhaseStream = uint64_t{1} << 40;
constexpr uint64_t kAttackStream = kPhaseStream + 1;

struct Context {
    ExperimentConfig cfg;
    Protocol protocol = Protocol::ramsey;
    SequenceOptions opts;
    std::vector<double> grid;
    NoiseModel noise = NoiseModel::noiseless();
    bool noisy = false;
    uint64_t seed = 0;
    Rng phase_rng;
    std::string meta;

    void note(const std::string &line) { meta += "# " + line + "\n"; }
};

[[noreturn]] void missing(const std::string &what) { throw Error(ErrorCode::config_missing, what); }

const PulseDef &pulse_named(const Context &ctx, const std::string &name) {
    const PulseDef *p = ctx.cfg.find_pulse(name);
    if (p == nullptr) {
        missing(std::string("protocol ") + protocol_name(ctx.protocol) + " needs a pulse named '" + name + "'");
    }
    return *p;
}

double interval_named(const Context &ctx, const std::string &name) {
    auto v = ctx.cfg.interval(name);
    if (!v) {
        missing(std::string("protocol ") + protocol_name(ctx.protocol) + " needs interval " + name);
    }
    return *v;
}

double resolve_phase(Context &ctx, const PulseDef &p) {
    if (p.phase) {
        return *p.phase;
    }
    if (ctx.noise.linewidth > 0) {
        return sample_relative_phase(ctx.noise.linewidth, ctx.noise.elapsed, ctx.phase_rng);
    }
    std::uniform_real_distribution<double> uniform(0.0, kTwoPi);
    return uniform(ctx.phase_rng);
}

FieldParams field_of(const Context &ctx, const PulseDef &p) {
    const FieldDef *f = ctx.cfg.find_field(p.field);
    if (f == nullptr) {
        throw Error(ErrorCode::config_reference, "pulse '" + p.name + "' references undefined field '" + p.field + "'");
    }
    return f->params();
}

WriteKey write_key(Context &ctx) {
    const PulseDef &p = pulse_named(ctx, "write");
    double phase = resolve_phase(ctx, p);
    return {field_of(ctx, p), p.tau, phase};
}

ScrambleKey scramble_key(Context &ctx, const std::string &name, double lead) {
    const PulseDef &p = pulse_named(ctx, name);
    double phase = resolve_phase(ctx, p);
    return ScrambleKey::make(field_of(ctx, p), p.tau, phase, lead);
}

FringeScan finish(const Context &ctx, FringeScan scan, uint64_t index) {
    if (!ctx.noisy) {
        return scan;
    }
    if (std::isfinite(ctx.noise.contrast_time_write)) {
        scan = apply_contrast_decay(scan, ctx.noise.contrast_time_write);
    }
    Rng rng = trial_stream(ctx.seed, index);
    return apply_measurement_noise(scan, ctx.noise, rng);
}

std::vector<double> default_grid(const Context &ctx) {
    const PulseDef *w = ctx.cfg.find_pulse("write");
    const FieldDef *f = w == nullptr ? nullptr : ctx.cfg.find_field(w->field);
    if (f == nullptr || f->detuning_hz == 0) {
        return make_grid(0.0, 20e-3, 0.1e-3);
    }
    double period = 1.0 / std::abs(f->detuning_hz);
    std::vector<double> g(201);
    for (size_t k = 0; k < g.size(); k++) {
        g[k] = 2.0 * period * static_cast<double>(k) / 200.0;
    }
    return g;
}

std::string fit_columns(const FitResult &f) {
    return format_number(f.amplitude) + "," + format_number(f.frequency) + "," + format_number(f.phase) + "," +
           format_number(f.offset) + "," + format_number(f.decay_time) + "," + format_number(f.rms_residual);
}

/// Sweeps one scramble phase over n equally spaced values in [0, 2pi).
template <typename Build>
RunResult sweep(Context &ctx, int64_t n, Build &&build) {
    if (n < 2) {
        throw Error(ErrorCode::invalid_argument, "a phase sweep needs at least 2 phases");
    }
    std::vector<FitResult> fits(static_cast<size_t>(n));
    std::vector<double> phis(fits.size());
    for (size_t k = 0; k < fits.size(); k++) {
        phis[k] = kTwoPi * static_cast<double>(k) / static_cast<double>(n);
        FringeScan sc = finish(ctx, scan(build(phis[k]), ctx.grid), k);
        fits[k] = fit_damped_sinusoid(sc);
    }
    RunResult out;
    bool all_converged = true;
    for (const auto &f : fits) {
        all_converged = all_converged && f.converged;
    }
    if (all_converged) {
        ctx.note("phase_spread_rad=" + format_number(phase_spread(fits)));
    } else {
        ctx.note("phase_spread_rad=unavailable (non-converged fits)");
        out.exit_code = kExitFitNotConverged;
        out.message = "one or more sweep fits did not converge";
    }
    out.csv = ctx.meta + "phi_S,amplitude,frequency_Hz,phase_rad,offset,decay_s,residual\n";
    for (size_t k = 0; k < fits.size(); k++) {
        out.csv += format_number(phis[k]) + "," + fit_columns(fits[k]) + "\n";
    }
    return out;
}

RunResult scan_result(const Context &ctx, const FringeScan &sc) {
    RunResult out;
    out.csv = ctx.meta + scan_to_csv(sc);
    return out;
}

void require_no_sweep(const Context &ctx, int64_t n) {
    if (n != 0) {
        throw Error(ErrorCode::invalid_argument,
                    std::string("phase sweeps do not apply to protocol ") + protocol_name(ctx.protocol));
    }
}

RunResult execute(Context &ctx, int64_t sweep_n, const RunOverrides &overrides) {
    const SequenceOptions &opts = ctx.opts;
    switch (ctx.protocol) {
        case Protocol::ramsey: {
            require_no_sweep(ctx, sweep_n);
            WriteKey w = write_key(ctx);
            return scan_result(ctx, finish(ctx, scan(build_write_read(w, 0.0, opts), ctx.grid), 0));
        }
        case Protocol::scramble: {
            WriteKey w = write_key(ctx);
            ScrambleKey s = scramble_key(ctx, "scramble", interval_named(ctx, "T1"));
            if (sweep_n != 0) {
                return sweep(ctx, sweep_n, [&](double phi) {
                    ScrambleKey k = s;
                    k.phi_s = phi;
                    return build_scrambled(w, k, 0.0, opts);
                });
            }
            ctx.note("phi_S_rad=" + format_number(s.phi_s));
            return scan_result(ctx, finish(ctx, scan(build_scrambled(w, s, 0.0, opts), ctx.grid), 0));
        }
        case Protocol::retrieve: {
            WriteKey w = write_key(ctx);
            ScrambleKey s = scramble_key(ctx, "scramble", interval_named(ctx, "T1"));
            RetrievalPlan plan = plan_retrieval(s.field.detuning, ctx.cfg.interval("T2").value_or(0.0));
            ctx.note("retrieval n=" + std::to_string(plan.n) + " T2_s=" + format_number(plan.T2));
            if (sweep_n != 0) {
                return sweep(ctx, sweep_n, [&](double phi) {
                    ScrambleKey k = s;
                    k.phi_s = phi;
                    return build_retrieved(w, k, plan, 0.0, opts);
                });
            }
            ctx.note("phi_S_rad=" + format_number(s.phi_s));
            return scan_result(ctx, finish(ctx, scan(build_retrieved(w, s, plan, 0.0, opts), ctx.grid), 0));
        }
        case Protocol::double_scramble: {
            WriteKey w = write_key(ctx);
            ScrambleKey s1 = scramble_key(ctx, "scramble1", interval_named(ctx, "T1"));
            ScrambleKey s2 = scramble_key(ctx, "scramble2", interval_named(ctx, "T2"));
            ctx.note("phi_S2_rad=" + format_number(s2.phi_s));
            if (sweep_n != 0) {
                return sweep(ctx, sweep_n, [&](double phi) {
                    ScrambleKey k = s1;
                    k.phi_s = phi;
                    return build_double_scrambled(w, k, s2, 0.0, opts);
                });
            }
            ctx.note("phi_S1_rad=" + format_number(s1.phi_s));
            return scan_result(ctx, finish(ctx, scan(build_double_scrambled(w, s1, s2, 0.0, opts), ctx.grid), 0));
        }
        case Protocol::double_retrieve: {
            WriteKey w = write_key(ctx);
            ScrambleKey s1 = scramble_key(ctx, "scramble1", interval_named(ctx, "T1"));
            ScrambleKey s2 = scramble_key(ctx, "scramble2", 0.0);
            auto t2 = ctx.cfg.interval("T2");
            DoubleRetrievalPlan plan = plan_double_retrieval(
                s1.field.detuning, s2.field.detuning, s2.tau, ctx.cfg.interval("T3").value_or(0.0),
                t2.value_or(0.0) + ctx.cfg.interval("T4").value_or(0.0), opts.clock_during_pulses, t2);
            s2.lead = plan.T2;
            ctx.note("double_retrieval m=" + std::to_string(plan.m) + " n=" + std::to_string(plan.n) +
                     " T2_s=" + format_number(plan.T2) + " T3_s=" + format_number(plan.T3) +
                     " T4_s=" + format_number(plan.T4));
            ctx.note("phi_S2_rad=" + format_number(s2.phi_s));
            if (sweep_n != 0) {
                return sweep(ctx, sweep_n, [&](double phi) {
                    ScrambleKey k = s1;
                    k.phi_s = phi;
                    return build_double_retrieved(w, k, s2, plan, 0.0, opts);
                });
            }
            ctx.note("phi_S1_rad=" + format_number(s1.phi_s));
            return scan_result(ctx, finish(ctx, scan(build_double_retrieved(w, s1, s2, plan, 0.0, opts), ctx.grid), 0));
        }
        case Protocol::attack: {
            require_no_sweep(ctx, sweep_n);
            WriteKey w = write_key(ctx);
            ScrambleKey s = scramble_key(ctx, "scramble", interval_named(ctx, "T1"));
            Rng rng = trial_stream(ctx.seed, kAttackStream);
            FringeScan sc = secret_readout(w, s, Cooperation::without_scramble_key, ctx.grid, rng, opts);
            return scan_result(ctx, finish(ctx, sc, 0));
        }
        case Protocol::fit: {
            require_no_sweep(ctx, sweep_n);
            FringeScan sc;
            if (overrides.input_csv) {
                std::ifstream in(*overrides.input_csv, std::ios::binary);
                if (!in) {
                    throw Error(ErrorCode::io, "cannot open scan '" + *overrides.input_csv + "'");
                }
                std::stringstream ss;
                ss << in.rdbuf();
                sc = parse_scan_csv(ss.str());
                ctx.note("input=" + *overrides.input_csv);
            } else {
                WriteKey w = write_key(ctx);
                sc = finish(ctx, scan(build_write_read(w, 0.0, opts), ctx.grid), 0);
            }
            FitResult f = fit_damped_sinusoid(sc);
            RunResult out;
            ctx.note(std::string("converged=") + (f.converged ? "yes" : "no"));
            out.csv = ctx.meta + "amplitude,frequency_Hz,phase_rad,offset,decay_s,residual\n" + fit_columns(f) + "\n";
            if (!f.converged) {
                out.exit_code = kExitFitNotConverged;
                out.message = "damped-sinusoid fit did not converge";
            }
            return out;
        }
    }
    throw Error(ErrorCode::invalid_argument, "unknown protocol");
}

}  // namespace

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::config_syntax:
        case ErrorCode::config_reference:
        case ErrorCode::config_missing:
        case ErrorCode::invalid_argument:
        case ErrorCode::invalid_field:
        case ErrorCode::invalid_duration:
        case ErrorCode::invalid_sequence:
        case ErrorCode::no_precession:
        case ErrorCode::plan_mismatch:
            return kExitConfig;
        case ErrorCode::infeasible:
            return kExitInfeasible;
        case ErrorCode::fit_failure:
            return kExitFitNotConverged;
        case ErrorCode::degraded_state:
        case ErrorCode::io:
            return kExitFailure;
    }
    return kExitFailure;
}

RunResult run(const ExperimentConfig &config, const RunOverrides &overrides) {
    try {
        Context ctx;
        ctx.cfg = config;
        if (overrides.clock_during_pulses) {
            ctx.cfg.clock_during_pulses = *overrides.clock_during_pulses;
        }
        if (overrides.protocol) {
            ctx.cfg.protocol = overrides.protocol;
        }
        if (!ctx.cfg.protocol) {
            throw Error(ErrorCode::config_missing, "missing protocol statement");
        }
        ctx.protocol = *ctx.cfg.protocol;
        ctx.opts = ctx.cfg.sequence_options();
        if (ctx.cfg.noise) {
            if (overrides.seed) {
                ctx.cfg.noise->seed = *overrides.seed;
            }
            ctx.noise = ctx.cfg.noise->model();
            ctx.noise.validate();
            ctx.noisy = true;
            ctx.seed = ctx.noise.seed;
        } else {
            ctx.seed = overrides.seed.value_or(0);
        }
        ctx.phase_rng = trial_stream(ctx.seed, kPhaseStream);

        if (overrides.grid) {
            ctx.grid = overrides.grid->values();
        } else if (ctx.cfg.grid) {
            ctx.grid = ctx.cfg.grid->values();
        } else {
            ctx.grid = default_grid(ctx);
        }

        ctx.note(std::string("protocol=") + protocol_name(ctx.protocol));
        ctx.note(std::string("frame=") + (ctx.cfg.frame_mode == FrameMode::lab ? "lab" : "rotating") +
                 " clock_during_pulses=" + (ctx.cfg.clock_during_pulses ? "on" : "off"));
        if (ctx.noisy) {
            ctx.note("seed=" + std::to_string(ctx.seed));
        }
        return execute(ctx, overrides.sweep_phis.value_or(ctx.cfg.sweep_phis), overrides);
    } catch (const Error &e) {
        return {exit_code_for(e.code()), "", e.what()};
    } catch (const std::exception &e) {
        return {kExitFailure, "", e.what()};
    }
}

std::string scan_to_csv(const FringeScan &scan) {
    std::string out = "T_s,P_e,sd\n";
    for (const auto &pt : scan.points) {
        out += format_number(pt.T) + "," + format_number(pt.p) + "," + format_number(pt.sd) + "\n";
    }
    return out;
}

FringeScan parse_scan_csv(std::string_view text) {
    FringeScan out;
    bool header_seen = false;
    int line_no = 0;
    while (!text.empty()) {
        line_no++;
        size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
            line.remove_suffix(1);
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            if (line.starts_with("T_s")) {
                continue;
            }
        }
        double cols[3] = {0.0, 0.0, 0.0};
        int count = 0;
        while (count < 3) {
            size_t comma = line.find(',');
            std::string_view cell = line.substr(0, comma);
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), cols[count]);
            if (ec != std::errc() || ptr != cell.data() + cell.size()) {
                throw Error(ErrorCode::invalid_argument, "scan CSV line " + std::to_string(line_no) + ": bad number");
            }
            count++;
            if (comma == std::string_view::npos) {
                break;
            }
            line = line.substr(comma + 1);
        }
        if (count < 2) {
            throw Error(ErrorCode::invalid_argument, "scan CSV line " + std::to_string(line_no) + ": need T_s,P_e");
        }
        out.points.push_back({cols[0], cols[1], cols[2]});
    }
    out.validate();
    return out;
}

}  // namespace dklock
