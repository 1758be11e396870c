/// Flat dotted-key configuration files for the simulator front ends.
///
/// Format: one `key = value` pair per line, `#` starts a comment, blank lines
/// are skipped.  Unknown keys are rejected.  An empty file yields the default
/// configuration.
#pragma once

#include <string>

#include "stefan2d/stefan.hpp"

namespace stefan2d {

// Parse the given text; throws std::invalid_argument naming the offending key
// on unknown keys, malformed values, or constraint violations.
SimConfig parse_config_text(const std::string& text);

// Parse the file at path; throws std::runtime_error if it cannot be read.
SimConfig parse_config(const std::string& path);

// Constraint checks shared by the parser and programmatic configuration;
// throws std::invalid_argument naming the violated key.
void validate_config(const SimConfig& cfg);

}  // namespace stefan2d
