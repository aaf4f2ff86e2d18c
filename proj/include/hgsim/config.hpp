#pragma once

// Scenario configuration: a strict INI-style text format with sections
// [course], [vehicle], [driver], [neuromuscular], [haptic], [pulse], [run].
// Unknown sections and keys are rejected; units are explicit in key names.
// Preset references are allowed either as a section-level `preset = name`
// key or as a top-level shorthand `driver = preset:low_visibility`.
//
// canonical_config() renders a Scenario back to this syntax with every value
// explicit (full precision, fixed key order), so the emitted snapshot
// re-parses to an identical scenario; run_id() hashes that canonical form.

#include <array>
#include <string>

#include "hgsim/ident.hpp"
#include "hgsim/simloop.hpp"

namespace hgsim {

// Parse a scenario from config text / a config file. Errors carry line
// numbers where available. The returned scenario is fully validated.
Scenario scenario_from_text(const std::string& text);
Scenario load_scenario_config(const std::string& path);

// Fully-resolved snapshot of a scenario in config syntax (LF line ends,
// %.17g numbers, fixed section and key order).
std::string canonical_config(const Scenario& sc);

// Content hash of canonical_config(sc): 16 lowercase hex digits (FNV-1a 64).
std::string run_id(const Scenario& sc);

// Identification initialisation file: sections [theta0], [bounds], [fixed],
// [weights], all optional, defaults as in the ident module.
struct IdentInit {
    IdentTheta theta0 = IdentTheta::defaults();
    ParamBounds bounds = ParamBounds::defaults();
    FixedNeuromuscular fixed{};
    std::array<double, 2> output_weights{0.0, 0.0};
};

IdentInit ident_init_from_text(const std::string& text);
IdentInit load_ident_init(const std::string& path);

}  // namespace hgsim
