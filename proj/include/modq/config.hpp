#pragma once

#include <filesystem>
#include <string>

#include "modq/harness.hpp"

namespace modq {

// Plain-text key-value config ("key = value", '#' comments). Unspecified
// keys keep their preset defaults; unknown keys are rejected with the
// offending name and line.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text);

std::string serialize_config(const RunConfig& config);

}  // namespace modq
