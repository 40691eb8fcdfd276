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

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "esrsim/ensemble.hpp"
#include "esrsim/pulse.hpp"
#include "esrsim/resonator.hpp"

// Experiment configuration as a JSON document. Every experiment has a full
// default document; user input is merged on top and may only use keys the
// defaults define. Data files carry the resolved document as a header of
// "# /json/pointer=value" lines, which load_config accepts back.

namespace esrsim {

using Json = nlohmann::json;

inline constexpr std::string_view kExperimentIds[] = {"fig2", "fig3", "fig4", "fig4a", "fig4b", "fig4c", "custom"};

/// Full default document for an experiment id. Throws ConfigError for
/// unknown ids.
Json default_config(std::string_view experiment);

/// Merges overrides into the defaults of overrides["experiment"] (or of
/// `experiment` when given and non-empty). Unknown keys and type mismatches
/// throw ConfigError.
Json resolve_config(const Json &overrides, std::string_view experiment = {});

/// Reads a JSON file or the header block of a data file written by this
/// library. Throws IoError when unreadable, ConfigError when malformed.
Json load_config(const std::string &path);

/// "# /pointer=value" lines for every leaf of the document, sorted by key.
std::string config_header(const Json &config);

/// Inverse of config_header. Stops at the first line not starting with '#'.
Json parse_config_header(std::istream &is);

EnsembleSpec ensemble_from_json(const Json &j);
Json ensemble_to_json(const EnsembleSpec &spec);

/// Returns the model when resonator.enabled is true.
std::optional<ResonatorModel> resonator_from_json(const Json &j);

/// Builds a sequence from a list of element objects:
///   {"type": "rect", "theta": rad, "phase": rad, "rabi_mhz": MHz}
///   {"type": "gaussian", "theta" | "fwhm_ns", "phase", "rabi_mhz", "truncation_factor"}
///   {"type": "comb", same keys as gaussian, "offsets_mhz": [...]}
///   {"type": "bb1", "theta": rad, "rabi_mhz": MHz}
///   {"type": "delay", "ns": ns}
///   {"type": "acquire", "window_half_ns": ns, "center_offset_ns": ns}
/// Any pulse element may carry "sigma" (amplitude error).
PulseSequence sequence_from_json(const Json &list);

/// Typed accessor that reports the pointer path on failure.
double get_number(const Json &j, std::string_view pointer);

}  // namespace esrsim
