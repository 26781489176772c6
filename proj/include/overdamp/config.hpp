#pragma once

// Flat key=value config format with colon-delimited structured values,
// shared by the CLI and the rate study. Diffable and hashable for the
// run manifest; parse(render(cfg)) is the identity.

#include <string>
#include <string_view>

#include "overdamp/model.hpp"
#include "overdamp/study.hpp"

namespace overdamp {

class ParseError : public ConfigError {
  public:
    using ConfigError::ConfigError;
};

// Fully validated SimConfig; violations carry the offending key and line.
SimConfig parse_sim_config(std::string_view text);

// SimConfig keys plus gamma_grid (comma list) and record_count.
RateStudySpec parse_rate_spec(std::string_view text);

std::string render_config(const SimConfig& cfg);
std::string render_rate_spec(const RateStudySpec& spec);

// Applies one "key=value" override on top of parsed text semantics.
std::string apply_override(std::string text, std::string_view key_value);

}  // namespace overdamp
