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

#include "core/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace dklock {

namespace {

struct Token {
    std::string_view text;
    int column;
};

std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
            i++;
        }
        if (i >= line.size()) {
            break;
        }
        size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') {
            j++;
        }
        out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
        i = j;
    }
    return out;
}

class LineParser {
   public:
    explicit LineParser(int line) : line_(line) {}

    [[noreturn]] void fail(int column, const std::string &message, ErrorCode code = ErrorCode::config_syntax) const {
        throw ConfigError(code, line_, column, message);
    }

    double number(std::string_view text, int column) const {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
            fail(column, "expected a number, got '" + std::string(text) + "'");
        }
        return v;
    }

    int64_t integer(std::string_view text, int column) const {
        int64_t v = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc() || ptr != text.data() + text.size()) {
            fail(column, "expected an integer, got '" + std::string(text) + "'");
        }
        return v;
    }

    uint64_t unsigned_integer(std::string_view text, int column) const {
        uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc() || ptr != text.data() + text.size()) {
            fail(column, "expected a non-negative integer, got '" + std::string(text) + "'");
        }
        return v;
    }

    double time(std::string_view text, int column) const {
        double scale = 1.0;
        if (text.ends_with("ms")) {
            scale = 1e-3;
            text.remove_suffix(2);
        } else if (text.ends_with("us")) {
            scale = 1e-6;
            text.remove_suffix(2);
        } else if (text.ends_with("s")) {
            text.remove_suffix(1);
        }
        return number(text, column) * scale;
    }

    /// Splits key=value; the value column is reported for value errors.
    std::pair<std::string_view, Token> key_value(const Token &tok) const {
        size_t eq = tok.text.find('=');
        if (eq == std::string_view::npos || eq == 0) {
            fail(tok.column, "expected key=value, got '" + std::string(tok.text) + "'");
        }
        return {tok.text.substr(0, eq), Token{tok.text.substr(eq + 1), tok.column + static_cast<int>(eq) + 1}};
    }

    int line() const { return line_; }

   private:
    int line_;
};

struct PulseSite {
    size_t index;
    int line;
    int column;
};

}  // namespace

ConfigError::ConfigError(ErrorCode code, int line, int column, const std::string &message)
    : Error(code, (line > 0 ? "line " + std::to_string(line) + ", column " : std::string("column ")) +
                      std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      detail_(message) {}

const char *protocol_name(Protocol p) {
    switch (p) {
        case Protocol::ramsey:
            return "ramsey";
        case Protocol::scramble:
            return "scramble";
        case Protocol::retrieve:
            return "retrieve";
        case Protocol::double_scramble:
            return "double-scramble";
        case Protocol::double_retrieve:
            return "double-retrieve";
        case Protocol::attack:
            return "attack";
        case Protocol::fit:
            return "fit";
    }
    return "?";
}

std::optional<Protocol> protocol_from_name(std::string_view name) {
    for (Protocol p : {Protocol::ramsey, Protocol::scramble, Protocol::retrieve, Protocol::double_scramble,
                       Protocol::double_retrieve, Protocol::attack, Protocol::fit}) {
        if (name == protocol_name(p)) {
            return p;
        }
    }
    return std::nullopt;
}

NoiseModel NoiseDef::model() const {
    NoiseModel m;
    m.linewidth = kTwoPi * linewidth_hz;
    m.atom_count = atoms;
    m.repeats = repeats;
    m.seed = seed;
    m.elapsed = elapsed;
    m.contrast_time_write = contrast_write;
    m.contrast_time_scramble = contrast_scramble;
    return m;
}

const FieldDef *ExperimentConfig::find_field(std::string_view label) const {
    for (const auto &f : fields) {
        if (f.label == label) {
            return &f;
        }
    }
    return nullptr;
}

const PulseDef *ExperimentConfig::find_pulse(std::string_view name) const {
    for (const auto &p : pulses) {
        if (p.name == name) {
            return &p;
        }
    }
    return nullptr;
}

std::optional<double> ExperimentConfig::interval(std::string_view name) const {
    auto it = intervals.find(std::string(name));
    if (it == intervals.end()) {
        return std::nullopt;
    }
    return it->second;
}

SequenceOptions ExperimentConfig::sequence_options() const {
    SequenceOptions opts;
    opts.clock_during_pulses = clock_during_pulses;
    if (frame_mode == FrameMode::lab) {
        opts.frame = FrameConvention::lab(kTwoPi * atomic_frequency_hz);
    }
    return opts;
}

GridDef parse_grid(std::string_view text) {
    LineParser lp(0);
    size_t a = text.find(':');
    size_t b = a == std::string_view::npos ? a : text.find(':', a + 1);
    if (b == std::string_view::npos) {
        lp.fail(1, "grid must look like <start>:<stop>:<step>");
    }
    GridDef g;
    g.start = lp.time(text.substr(0, a), 1);
    g.stop = lp.time(text.substr(a + 1, b - a - 1), static_cast<int>(a) + 2);
    g.step = lp.time(text.substr(b + 1), static_cast<int>(b) + 2);
    if (!(g.step > 0) || g.stop < g.start || g.start < 0) {
        lp.fail(1, "grid needs 0 <= start <= stop and step > 0");
    }
    return g;
}

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig cfg;
    std::vector<PulseSite> pulse_sites;
    bool saw_grid = false;
    int line_no = 0;

    while (!text.empty() || line_no == 0) {
        line_no++;
        size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (size_t hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        auto toks = tokenize(line);
        LineParser lp(line_no);
        if (toks.empty()) {
            if (text.empty()) {
                break;
            }
            continue;
        }
        std::string_view head = toks[0].text;
        auto args = std::span<const Token>(toks).subspan(1);

        if (head == "frame") {
            if (args.empty()) {
                lp.fail(toks[0].column, "frame needs 'rotating' or 'lab <omega_a_Hz>'");
            }
            if (args[0].text == "rotating" && args.size() == 1) {
                cfg.frame_mode = FrameMode::rotating;
                cfg.atomic_frequency_hz = 0.0;
            } else if (args[0].text == "lab" && args.size() == 2) {
                cfg.frame_mode = FrameMode::lab;
                cfg.atomic_frequency_hz = lp.number(args[1].text, args[1].column);
            } else {
                lp.fail(args[0].column, "frame needs 'rotating' or 'lab <omega_a_Hz>'");
            }
        } else if (head == "clock_during_pulses") {
            if (args.size() != 1 || (args[0].text != "on" && args[0].text != "off")) {
                lp.fail(toks[0].column, "clock_during_pulses needs 'on' or 'off'");
            }
            cfg.clock_during_pulses = args[0].text == "on";
        } else if (head == "field") {
            if (args.empty() || args[0].text.find('=') != std::string_view::npos) {
                lp.fail(toks[0].column, "field needs a label");
            }
            FieldDef f;
            f.label = std::string(args[0].text);
            if (cfg.find_field(f.label) != nullptr) {
                lp.fail(args[0].column, "field '" + f.label + "' defined twice");
            }
            std::set<std::string_view> seen;
            for (const auto &tok : args.subspan(1)) {
                auto [key, val] = lp.key_value(tok);
                if (!seen.insert(key).second) {
                    lp.fail(tok.column, "duplicate key '" + std::string(key) + "'");
                }
                if (key == "rabi_hz") {
                    f.rabi_hz = lp.number(val.text, val.column);
                } else if (key == "detuning_hz") {
                    f.detuning_hz = lp.number(val.text, val.column);
                } else {
                    lp.fail(tok.column, "unknown key '" + std::string(key) + "' in field");
                }
            }
            if (!seen.contains("rabi_hz") || !seen.contains("detuning_hz")) {
                lp.fail(toks[0].column, "field needs rabi_hz= and detuning_hz=");
            }
            if (!(f.rabi_hz > 0)) {
                lp.fail(toks[0].column, "field '" + f.label + "' needs rabi_hz > 0");
            }
            cfg.fields.push_back(std::move(f));
        } else if (head == "pulse") {
            if (args.empty() || args[0].text.find('=') != std::string_view::npos) {
                lp.fail(toks[0].column, "pulse needs a name");
            }
            PulseDef p;
            p.name = std::string(args[0].text);
            if (cfg.find_pulse(p.name) != nullptr) {
                lp.fail(args[0].column, "pulse '" + p.name + "' defined twice");
            }
            int field_column = toks[0].column;
            std::set<std::string_view> seen;
            for (const auto &tok : args.subspan(1)) {
                auto [key, val] = lp.key_value(tok);
                if (!seen.insert(key).second) {
                    lp.fail(tok.column, "duplicate key '" + std::string(key) + "'");
                }
                if (key == "field") {
                    p.field = std::string(val.text);
                    field_column = val.column;
                } else if (key == "tau_s") {
                    p.tau = lp.time(val.text, val.column);
                } else if (key == "phase_rad") {
                    if (val.text == "random") {
                        p.phase.reset();
                    } else {
                        p.phase = lp.number(val.text, val.column);
                    }
                } else {
                    lp.fail(tok.column, "unknown key '" + std::string(key) + "' in pulse");
                }
            }
            if (!seen.contains("field") || !seen.contains("tau_s") || !seen.contains("phase_rad")) {
                lp.fail(toks[0].column, "pulse needs field=, tau_s= and phase_rad=");
            }
            if (!(p.tau > 0)) {
                lp.fail(toks[0].column, "pulse '" + p.name + "' needs tau_s > 0");
            }
            pulse_sites.push_back({cfg.pulses.size(), line_no, field_column});
            cfg.pulses.push_back(std::move(p));
        } else if (head == "protocol") {
            if (args.size() != 1) {
                lp.fail(toks[0].column, "protocol needs exactly one kind");
            }
            auto p = protocol_from_name(args[0].text);
            if (!p) {
                lp.fail(args[0].column, "unknown protocol '" + std::string(args[0].text) + "'");
            }
            if (cfg.protocol) {
                lp.fail(toks[0].column, "protocol given twice");
            }
            cfg.protocol = p;
        } else if (head == "interval") {
            if (args.empty()) {
                lp.fail(toks[0].column, "interval needs at least one T<k>=<t>");
            }
            for (const auto &tok : args) {
                auto [key, val] = lp.key_value(tok);
                if (key != "T1" && key != "T2" && key != "T3" && key != "T4") {
                    lp.fail(tok.column, "unknown interval '" + std::string(key) + "'");
                }
                double v = lp.time(val.text, val.column);
                if (v < 0) {
                    lp.fail(val.column, "intervals must be >= 0");
                }
                cfg.intervals[std::string(key)] = v;
            }
        } else if (head == "grid") {
            if (saw_grid) {
                lp.fail(toks[0].column, "only one grid statement is allowed");
            }
            if (args.size() != 1) {
                lp.fail(toks[0].column, "grid needs <start>:<stop>:<step>");
            }
            try {
                cfg.grid = parse_grid(args[0].text);
            } catch (const ConfigError &e) {
                lp.fail(args[0].column + e.column() - 1, e.detail());
            }
            saw_grid = true;
        } else if (head == "noise") {
            NoiseDef n;
            std::set<std::string_view> seen;
            for (const auto &tok : args) {
                auto [key, val] = lp.key_value(tok);
                if (!seen.insert(key).second) {
                    lp.fail(tok.column, "duplicate key '" + std::string(key) + "'");
                }
                if (key == "linewidth_hz") {
                    n.linewidth_hz = lp.number(val.text, val.column);
                } else if (key == "atoms") {
                    n.atoms = lp.integer(val.text, val.column);
                } else if (key == "repeats") {
                    n.repeats = lp.integer(val.text, val.column);
                } else if (key == "seed") {
                    n.seed = lp.unsigned_integer(val.text, val.column);
                } else if (key == "elapsed_s") {
                    n.elapsed = lp.time(val.text, val.column);
                } else if (key == "contrast_write_s") {
                    n.contrast_write = lp.time(val.text, val.column);
                } else if (key == "contrast_scramble_s") {
                    n.contrast_scramble = lp.time(val.text, val.column);
                } else {
                    lp.fail(tok.column, "unknown key '" + std::string(key) + "' in noise");
                }
            }
            try {
                n.model().validate();
            } catch (const Error &e) {
                lp.fail(toks[0].column, e.what());
            }
            cfg.noise = n;
        } else if (head == "sweep") {
            if (args.size() != 1) {
                lp.fail(toks[0].column, "sweep needs phis=<n>");
            }
            auto [key, val] = lp.key_value(args[0]);
            if (key != "phis") {
                lp.fail(args[0].column, "unknown key '" + std::string(key) + "' in sweep");
            }
            cfg.sweep_phis = lp.integer(val.text, val.column);
            if (cfg.sweep_phis < 0) {
                lp.fail(val.column, "sweep phis must be >= 0");
            }
        } else {
            lp.fail(toks[0].column, "unknown statement '" + std::string(head) + "'");
        }
        if (text.empty()) {
            break;
        }
    }

    for (const auto &site : pulse_sites) {
        const auto &p = cfg.pulses[site.index];
        if (cfg.find_field(p.field) == nullptr) {
            throw ConfigError(ErrorCode::config_reference, site.line, site.column,
                              "pulse '" + p.name + "' references undefined field '" + p.field + "'");
        }
    }
    if (!cfg.protocol) {
        throw ConfigError(ErrorCode::config_missing, line_no, 1, "missing protocol statement");
    }
    return cfg;
}

ExperimentConfig load_config(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::io, "cannot open config '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string format_number(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) {
        return "nan";
    }
    return std::string(buf, ptr);
}

std::string serialize_config(const ExperimentConfig &config) {
    std::string out;
    auto line = [&](const std::string &s) {
        out += s;
        out += '\n';
    };
    if (config.frame_mode == FrameMode::lab) {
        line("frame lab " + format_number(config.atomic_frequency_hz));
    } else {
        line("frame rotating");
    }
    line(std::string("clock_during_pulses ") + (config.clock_during_pulses ? "on" : "off"));
    for (const auto &f : config.fields) {
        line("field " + f.label + " rabi_hz=" + format_number(f.rabi_hz) +
             " detuning_hz=" + format_number(f.detuning_hz));
    }
    for (const auto &p : config.pulses) {
        line("pulse " + p.name + " field=" + p.field + " tau_s=" + format_number(p.tau) +
             " phase_rad=" + (p.phase ? format_number(*p.phase) : std::string("random")));
    }
    if (config.protocol) {
        line(std::string("protocol ") + protocol_name(*config.protocol));
    }
    if (!config.intervals.empty()) {
        std::string s = "interval";
        for (const auto &[k, v] : config.intervals) {
            s += " " + k + "=" + format_number(v);
        }
        line(s);
    }
    if (config.grid) {
        line("grid " + format_number(config.grid->start) + ":" + format_number(config.grid->stop) + ":" +
             format_number(config.grid->step));
    }
    if (config.noise) {
        const auto &n = *config.noise;
        line("noise linewidth_hz=" + format_number(n.linewidth_hz) + " atoms=" + std::to_string(n.atoms) +
             " repeats=" + std::to_string(n.repeats) + " seed=" + std::to_string(n.seed) +
             " elapsed_s=" + format_number(n.elapsed) + " contrast_write_s=" + format_number(n.contrast_write) +
             " contrast_scramble_s=" + format_number(n.contrast_scramble));
    }
    if (config.sweep_phis != 0) {
        line("sweep phis=" + std::to_string(config.sweep_phis));
    }
    return out;
}

}  // namespace dklock
