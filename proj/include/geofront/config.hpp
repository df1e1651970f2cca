#pragma once

// Flat key=value configuration for the dual-front engine.

#include <stdexcept>
#include <string>
#include <vector>

#include "geofront/dualfront.hpp"

namespace geofront {

/// Unknown key or unparsable value; `key()` names the offending entry.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::invalid_argument(message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Recognised keys, in documentation order.
const std::vector<std::string>& config_keys();

void apply_config_entry(DualFrontConfig& config, const std::string& key, const std::string& value);
/// "key=value" as given on the command line.
void apply_config_assignment(DualFrontConfig& config, const std::string& assignment);
/// One key=value per line; '#' starts a comment; blank lines are ignored.
void apply_config_text(DualFrontConfig& config, const std::string& text);
void apply_config_file(DualFrontConfig& config, const std::string& path);

/// Round-trippable key=value dump.
std::string format_config(const DualFrontConfig& config);

}  // namespace geofront
