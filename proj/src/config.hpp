#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "solver.hpp"

namespace uqrpca {

/// One documented configuration key. The registry is the single source of
/// truth for names, defaults, and help text across the config file, the C
/// API, the CLI, and the manifest echo.
struct ConfigKey {
  const char* name;
  const char* default_value;
  const char* description;
};

const std::vector<ConfigKey>& config_registry();

/// String-keyed configuration with registry-validated keys. Precedence is
/// handled by the caller: defaults, then file values, then explicit sets.
class Config {
 public:
  Config();  // registry defaults

  /// Unknown keys raise ConfigError.
  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;

  int get_int(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;

  /// Parse a UTF-8 `key = value` file with '#' comments.
  void load_file(const std::string& path);

  SolverConfig solver_config() const;
  std::optional<std::pair<int, int>> resize_spec() const;  // (w, h) or none
  std::map<std::string, std::string> entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace uqrpca
