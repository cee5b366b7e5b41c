#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "xrai/pipeline/config.hpp"

namespace xrai::io {

/// Parse the flat `key = value` format. `#` starts a comment. `family`, `n`
/// and `d` select the defaults; every other key overrides one field. Unknown
/// keys and rule violations throw ConfigError.
pipeline::ExperimentConfig parse_config(std::string_view text);

pipeline::ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text form: every field, one `key = value` per line, fixed order,
/// doubles in shortest round-trip form. parse_config(to_text(c)) == c.
std::string to_text(const pipeline::ExperimentConfig& cfg);

/// 16 hex digits of FNV-1a over to_text(cfg).
std::string config_digest(const pipeline::ExperimentConfig& cfg);

bool operator==(const pipeline::ExperimentConfig& a, const pipeline::ExperimentConfig& b);

}  // namespace xrai::io
