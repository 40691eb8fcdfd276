// Copyright 2026 The esrsim Authors
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

#include "esrsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "esrsim/composite.hpp"
#include "esrsim/error.hpp"

namespace esrsim {
namespace {

Json common_defaults() {
    return {
        {"experiment", "custom"},
        {"seed", 0},
        {"threads", 0},
        {"dt_ns", kAwgGridNs},
        {"resonator",
         {{"enabled", false},
          {"center_freq_ghz", 17.06},
          {"bandwidth_mhz", 255.0},
          {"q_factor", 66.0},
          {"efficiency_mhz_per_sqrt_w", 57.6},
          {"carrier_offset_mhz", 0.0}}},
        {"ensemble",
         {{"lineshape", "gaussian"},
          {"fwhm_mhz", 9.35},
          {"n_packets", 601},
          {"entries", Json::array()},
          {"b1", {{"distribution", "delta"}, {"relative_sd", 0.05}, {"points", 9}}},
          {"t1_ns", 1e6},
          {"t2_ns", 200.0},
          {"sampling", "quadrature"}}},
    };
}

Json fig2_defaults() {
    Json j = common_defaults();
    j["experiment"] = "fig2";
    j["rabi_mhz"] = 38.46;
    j["tau_ns"] = 300.0;
    j["window_half_ns"] = 100.0;
    j["error_scope"] = "global";
    j["sigma_grid"] = {-0.4, -0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.3, 0.4};
    return j;
}

Json fig3_defaults() {
    Json j = common_defaults();
    j["experiment"] = "fig3";
    j["rabi_mhz"] = 38.46;
    j["tau_ns"] = 300.0;
    j["window_half_ns"] = 100.0;
    j["angle_step_pi"] = 0.05;
    j["angle_max_pi"] = 5.0;
    j["envelope_half_width_pi"] = 0.5;
    j["ensemble"]["n_packets"] = 101;
    j["ensemble"]["b1"]["distribution"] = "gaussian";
    return j;
}

Json fig4_defaults(std::string_view id) {
    Json j = common_defaults();
    j["experiment"] = id;
    j["offsets_mhz"] = {-20.0, -10.0, 0.0, 10.0, 20.0};
    j["rabi_mhz"] = 1.16;
    j["excitation_fwhm_ns"] = 203.0;
    j["refocus_fwhm_ns"] = 401.7;
    j["truncation_factor"] = 3.0;
    j["tau_ns"] = 500.0;
    j["trace_window_half_ns"] = 500.0;
    j["amplifier_ceiling_mhz"] = 0.0;
    j["spectrum"] = {{"lo_mhz", -40.0}, {"hi_mhz", 40.0}, {"step_mhz", 0.1}};
    j["sweep"] = {{"lo_mhz", -40.0}, {"hi_mhz", 40.0}, {"step_mhz", 2.0}, {"window_half_ns", 100.0}};
    j["ensemble"]["fwhm_mhz"] = 40.0;
    j["ensemble"]["n_packets"] = 1001;
    j["ensemble"]["t2_ns"] = 2000.0;
    return j;
}

Json custom_defaults() {
    Json j = common_defaults();
    j["metric"] = "magnitude";
    j["detection_phase_rad"] = kPi / 2.0;
    j["sequence"] = Json::array();
    j["sweep_offsets_mhz"] = {0.0};
    return j;
}

bool same_kind(const Json &a, const Json &b) {
    if (a.is_number() && b.is_number()) {
        return true;
    }
    return a.type() == b.type();
}

// Overlays `patch` on `base`, rejecting keys base does not define.
void overlay(Json &base, const Json &patch, const std::string &path) {
    if (!patch.is_object()) {
        throw ConfigError("config at '" + (path.empty() ? "/" : path) + "' must be an object");
    }
    for (auto it = patch.begin(); it != patch.end(); ++it) {
        const std::string key = path + "/" + it.key();
        if (!base.contains(it.key())) {
            throw ConfigError("unknown config key '" + key + "'");
        }
        Json &slot = base[it.key()];
        if (slot.is_object()) {
            overlay(slot, it.value(), key);
        } else if (!same_kind(slot, it.value())) {
            throw ConfigError("config key '" + key + "' has the wrong type");
        } else {
            slot = it.value();
        }
    }
}

void emit_leaves(const Json &j, const std::string &path, std::map<std::string, std::string> &out) {
    if (j.is_object() && !j.empty()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            emit_leaves(it.value(), path + "/" + it.key(), out);
        }
    } else if (j.is_array() && !j.empty()) {
        for (std::size_t i = 0; i < j.size(); ++i) {
            emit_leaves(j[i], path + "/" + std::to_string(i), out);
        }
    } else {
        out[path] = j.dump();
    }
}

template <class T>
T get_as(const Json &j, const char *key, const T &fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception &) {
        throw ConfigError(std::string("config key '") + key + "' has the wrong type");
    }
}

double require_number(const Json &j, const char *key) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw ConfigError(std::string("sequence element needs numeric '") + key + "'");
    }
    return j.at(key).get<double>();
}

PulseSegment shaped_segment(const Json &e) {
    const double rabi = require_number(e, "rabi_mhz");
    const double phase = get_as<double>(e, "phase", 0.0);
    const double trunc = get_as<double>(e, "truncation_factor", 3.0);
    if (e.contains("fwhm_ns")) {
        return gaussian_pulse_fwhm(require_number(e, "fwhm_ns"), phase, rabi, trunc);
    }
    return gaussian_pulse(require_number(e, "theta"), phase, rabi, trunc);
}

}  // namespace

Json default_config(std::string_view experiment) {
    if (experiment == "fig2") {
        return fig2_defaults();
    }
    if (experiment == "fig3") {
        return fig3_defaults();
    }
    if (experiment == "fig4" || experiment == "fig4a" || experiment == "fig4b" || experiment == "fig4c") {
        return fig4_defaults(experiment);
    }
    if (experiment == "custom") {
        return custom_defaults();
    }
    throw ConfigError("unknown experiment '" + std::string(experiment) + "'");
}

Json resolve_config(const Json &overrides, std::string_view experiment) {
    std::string id(experiment);
    if (id.empty()) {
        id = overrides.is_object() && overrides.contains("experiment") && overrides["experiment"].is_string()
                 ? overrides["experiment"].get<std::string>()
                 : std::string("custom");
    }
    Json resolved = default_config(id);
    if (!overrides.is_null()) {
        overlay(resolved, overrides, "");
    }
    resolved["experiment"] = id;
    return resolved;
}

Json load_config(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw IoError("cannot open config " + path);
    }
    if (f.peek() == '#') {
        return parse_config_header(f);
    }
    try {
        return Json::parse(f);
    } catch (const Json::parse_error &e) {
        throw ConfigError("malformed config " + path + ": " + e.what());
    }
}

std::string config_header(const Json &config) {
    std::map<std::string, std::string> leaves;
    emit_leaves(config, "", leaves);
    std::string out;
    for (const auto &[key, value] : leaves) {
        out += "# " + key + "=" + value + "\n";
    }
    return out;
}

Json parse_config_header(std::istream &is) {
    Json out = Json::object();
    std::string line;
    while (is.peek() == '#' && std::getline(is, line)) {
        if (line.size() < 2 || line.compare(0, 2, "# ") != 0) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("malformed header line: " + line);
        }
        try {
            Json::json_pointer ptr(line.substr(2, eq - 2));
            out[ptr] = Json::parse(line.substr(eq + 1));
        } catch (const Json::exception &e) {
            throw ConfigError("malformed header line: " + line + " (" + e.what() + ")");
        }
    }
    return out;
}

EnsembleSpec ensemble_from_json(const Json &j) {
    EnsembleSpec spec;
    const auto shape = get_as<std::string>(j, "lineshape", "gaussian");
    const double fwhm = get_as<double>(j, "fwhm_mhz", 9.35);
    if (shape == "gaussian") {
        spec.lineshape = GaussianLine{fwhm};
    } else if (shape == "lorentzian") {
        spec.lineshape = LorentzianLine{fwhm};
    } else if (shape == "tabulated") {
        TabulatedLine t;
        for (const auto &e : get_as<Json>(j, "entries", Json::array())) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
                throw ConfigError("tabulated entries must be [detuning_mhz, weight] pairs");
            }
            t.entries.emplace_back(e[0].get<double>(), e[1].get<double>());
        }
        spec.lineshape = std::move(t);
    } else {
        throw ConfigError("unknown lineshape '" + shape + "' (expected gaussian|lorentzian|tabulated)");
    }
    spec.n_packets = get_as<int>(j, "n_packets", spec.n_packets);
    const Json b1 = get_as<Json>(j, "b1", Json::object());
    const auto dist = get_as<std::string>(b1, "distribution", "delta");
    if (dist == "delta") {
        spec.b1 = DeltaB1{};
    } else if (dist == "gaussian") {
        spec.b1 = GaussianB1{get_as<double>(b1, "relative_sd", 0.05), get_as<int>(b1, "points", 9)};
    } else {
        throw ConfigError("unknown b1 distribution '" + dist + "' (expected delta|gaussian)");
    }
    spec.t1_ns = get_as<double>(j, "t1_ns", spec.t1_ns);
    spec.t2_ns = get_as<double>(j, "t2_ns", spec.t2_ns);
    const auto sampling = get_as<std::string>(j, "sampling", "quadrature");
    if (sampling == "quadrature") {
        spec.sampling = Sampling::Quadrature;
    } else if (sampling == "random") {
        spec.sampling = Sampling::Random;
    } else {
        throw ConfigError("unknown sampling '" + sampling + "' (expected quadrature|random)");
    }
    return spec;
}

Json ensemble_to_json(const EnsembleSpec &spec) {
    Json j = common_defaults()["ensemble"];
    std::visit(
        [&](const auto &l) {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, GaussianLine>) {
                j["lineshape"] = "gaussian";
                j["fwhm_mhz"] = l.fwhm_mhz;
            } else if constexpr (std::is_same_v<T, LorentzianLine>) {
                j["lineshape"] = "lorentzian";
                j["fwhm_mhz"] = l.fwhm_mhz;
            } else {
                j["lineshape"] = "tabulated";
                for (const auto &[d, w] : l.entries) {
                    j["entries"].push_back({d, w});
                }
            }
        },
        spec.lineshape);
    j["n_packets"] = spec.n_packets;
    if (const auto *g = std::get_if<GaussianB1>(&spec.b1)) {
        j["b1"] = {{"distribution", "gaussian"}, {"relative_sd", g->relative_sd}, {"points", g->points}};
    }
    j["t1_ns"] = spec.t1_ns;
    j["t2_ns"] = spec.t2_ns;
    j["sampling"] = spec.sampling == Sampling::Random ? "random" : "quadrature";
    return j;
}

std::optional<ResonatorModel> resonator_from_json(const Json &j) {
    if (!get_as<bool>(j, "enabled", false)) {
        return std::nullopt;
    }
    ResonatorModel m;
    m.center_freq_ghz = get_as<double>(j, "center_freq_ghz", m.center_freq_ghz);
    m.bandwidth_mhz = get_as<double>(j, "bandwidth_mhz", m.bandwidth_mhz);
    m.q_factor = get_as<double>(j, "q_factor", m.q_factor);
    m.efficiency_mhz_per_sqrt_w = get_as<double>(j, "efficiency_mhz_per_sqrt_w", m.efficiency_mhz_per_sqrt_w);
    check_consistency(m);
    return m;
}

PulseSequence sequence_from_json(const Json &list) {
    if (!list.is_array()) {
        throw ConfigError("sequence must be a list of elements");
    }
    PulseSequence seq;
    for (const auto &e : list) {
        if (!e.is_object() || !e.contains("type") || !e["type"].is_string()) {
            throw ConfigError("sequence element needs a string 'type'");
        }
        const auto type = e["type"].get<std::string>();
        const double sigma = get_as<double>(e, "sigma", 0.0);
        PulseSequence part;
        if (type == "rect") {
            part.then(rect_pulse(require_number(e, "theta"), get_as<double>(e, "phase", 0.0),
                                 require_number(e, "rabi_mhz")));
        } else if (type == "gaussian") {
            part.then(shaped_segment(e));
        } else if (type == "comb") {
            const auto offsets = get_as<std::vector<double>>(e, "offsets_mhz", {0.0});
            part.then(comb_superpose(shaped_segment(e), offsets));
        } else if (type == "bb1") {
            part = bb1(require_number(e, "theta"), require_number(e, "rabi_mhz"));
        } else if (type == "delay") {
            const double ns = require_number(e, "ns");
            if (!(ns >= 0.0) || !std::isfinite(ns)) {
                throw DomainError("delay must be >= 0");
            }
            part.then(Delay{ns});
        } else if (type == "acquire") {
            part.then(Acquire{get_as<double>(e, "window_half_ns", 100.0), get_as<double>(e, "center_offset_ns", 0.0)});
        } else {
            throw ConfigError("unknown sequence element type '" + type + "'");
        }
        if (sigma != 0.0) {
            part = inject_amplitude_error(part, sigma, all_segments());
        }
        seq.then(part);
    }
    return seq;
}

double get_number(const Json &j, std::string_view pointer) {
    try {
        const Json &v = j.at(Json::json_pointer(std::string(pointer)));
        if (!v.is_number()) {
            throw ConfigError("config key '" + std::string(pointer) + "' must be a number");
        }
        return v.get<double>();
    } catch (const Json::exception &) {
        throw ConfigError("config key '" + std::string(pointer) + "' is missing");
    }
}

}  // namespace esrsim
