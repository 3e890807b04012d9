#pragma once

// Scenario files: INI text with sections [route], [bs.N], [lte], [mmwave],
// [blockage], [traffic], [policy] and an optional top-level `seed`. Every
// key is optional; missing keys keep the defaults of ScenarioConfig.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "mecsim/model.hpp"

namespace mecsim {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Parses and validates; all problems are reported together.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// FNV-1a 64 of the file bytes, as 16 hex digits.
std::string config_hash(const std::string& text);
std::string file_hash(const std::filesystem::path& path);

}  // namespace mecsim
