#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bivamp/experiments.hpp"

namespace bivamp::cli {

using Setting = std::pair<std::string, std::vector<std::string>>;

// Reads a flat TOML file into (key, values) pairs in file order. Tables are
// rejected.
std::vector<Setting> read_config_file(const std::string& path);

// Builds a configuration from the preset named on the command line, else in
// the file, else "custom"; then applies the file settings and finally the
// command-line settings. Throws std::invalid_argument on unknown keys or on
// conflicting values.
ExperimentConfig resolve_config(const std::vector<Setting>& file_settings,
                                const std::vector<Setting>& cli_settings);

}  // namespace bivamp::cli
