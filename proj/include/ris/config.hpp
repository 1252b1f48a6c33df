#pragma once

#include <string>

#include "ris/bench.hpp"

namespace ris {

// Section-IV defaults. Desk scale shrinks the RISs to 8 elements each and
// keeps 20 trials; paper scale uses 16 elements and 100 trials.
ScenarioConfig default_config(bool paper_scale = false);

// Flat dotted-key text format, one `key = value` per line, '#' comments.
// Power values accept a dBm suffix (converted to watts), gains a dB suffix.
// Unknown keys or malformed values throw ConfigError naming the field.
ScenarioConfig parse_config_text(const std::string& text, ScenarioConfig base);
ScenarioConfig load_config(const std::string& path, ScenarioConfig base);

}  // namespace ris
