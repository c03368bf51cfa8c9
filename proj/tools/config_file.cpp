#include "config_file.hpp"

#include <stdexcept>

#include <CLI11.hpp>

namespace bivamp::cli {

namespace {

const Setting* find_last(const std::vector<Setting>& settings, const std::string& key) {
  const Setting* found = nullptr;
  for (const Setting& s : settings) {
    if (s.first == key) found = &s;
  }
  return found;
}

std::string single(const Setting& s) {
  if (s.second.size() != 1) {
    throw std::invalid_argument("config error: '" + s.first + "' takes one value");
  }
  return s.second.front();
}

bool parse_bool(const Setting& s) {
  const std::string v = single(s);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config error: '" + s.first + "' expects a boolean, got '" +
                              v + "'");
}

}  // namespace

std::vector<Setting> read_config_file(const std::string& path) {
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_file(path);
  } catch (const CLI::Error& e) {
    throw std::invalid_argument("config error: cannot read '" + path + "': " + e.what());
  }
  std::vector<Setting> settings;
  for (const CLI::ConfigItem& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty()) {
      throw std::invalid_argument("config error: tables are not supported ('" +
                                  item.fullname() + "' in " + path + ")");
    }
    settings.emplace_back(item.name, item.inputs);
  }
  return settings;
}

ExperimentConfig resolve_config(const std::vector<Setting>& file_settings,
                                const std::vector<Setting>& cli_settings) {
  std::string preset = "custom";
  bool paper_scale = false;
  for (const auto* layer : {&file_settings, &cli_settings}) {
    if (const Setting* s = find_last(*layer, "preset")) preset = single(*s);
    if (const Setting* s = find_last(*layer, "paper_scale")) {
      paper_scale = parse_bool(*s);
    }
  }
  ExperimentConfig config = preset_config(preset, paper_scale);
  for (const auto* layer : {&file_settings, &cli_settings}) {
    for (const Setting& s : *layer) {
      if (s.first == "preset" || s.first == "paper_scale") continue;
      apply_setting(config, s.first, s.second);
    }
  }
  config.validate();
  return config;
}

}  // namespace bivamp::cli
