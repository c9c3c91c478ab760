#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace uqrpca {

const std::vector<ConfigKey>& config_registry() {
  static const std::vector<ConfigKey> keys = {
      {"rank", "1", "quaternion rank of the background component"},
      {"iters", "20", "ADMM iterations"},
      {"mu0", "0.01", "initial penalty value"},
      {"rho", "1.5", "penalty growth factor per iteration"},
      {"rho1", "auto", "noise sparsity weight; auto = 2/sqrt(m*n)"},
      {"rho2", "auto", "TV regularization weight; auto = 0.035*sqrt(m*n)"},
      {"c1", "1.0", "low-rank bidirectional weight strength"},
      {"c2", "0.1", "sparsity bidirectional weight strength"},
      {"eps", "1e-4", "small constant inside the sparsity log weight"},
      {"block_h", "16", "block height in pixels"},
      {"block_w", "16", "block width in pixels"},
      {"fg_threshold", "0.11", "foreground binarization threshold"},
      {"no_crib", "false", "skip the column-replication background refinement"},
      {"resize_w", "0", "resize frames to this width on load (0 = keep)"},
      {"resize_h", "0", "resize frames to this height on load (0 = keep)"},
      {"threads", "0", "worker threads for data-parallel stages (0 = auto)"},
      {"tau", "20", "gray-level threshold for pEPs/pCEPs"},
      {"frame_average", "false", "average detection metrics per frame instead of pixel counts"},
      {"frames", "", "input frame directory"},
      {"out", "", "output directory"},
      {"pred", "", "predicted frames or masks directory"},
      {"gt", "", "ground-truth frames or masks directory"},
      {"task", "", "evaluation task: detection or background"},
      {"json", "", "metrics JSON report path"},
      {"csv", "", "metrics or benchmark CSV path"},
      {"mask", "", "mask directory for synthesis"},
      {"background", "", "background image path for synthesis"},
      {"rows", "10000", "benchmark row count"},
      {"cols", "25,50,75,100,125,150,175,200", "benchmark column counts"},
      {"bench_iters", "20", "benchmark iterations per size"},
      {"seed", "0", "benchmark RNG seed"},
  };
  return keys;
}

Config::Config() {
  for (const ConfigKey& k : config_registry()) values_[k.name] = k.default_value;
}

void Config::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown configuration key: " + key);
  it->second = value;
}

const std::string& Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown configuration key: " + key);
  return it->second;
}

int Config::get_int(const std::string& key) const {
  const std::string& v = get(key);
  try {
    size_t pos = 0;
    const int out = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "' expects an integer, got '" + v + "'");
  }
}

double Config::get_double(const std::string& key) const {
  const std::string& v = get(key);
  try {
    size_t pos = 0;
    const double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "' expects a number, got '" + v + "'");
  }
}

bool Config::get_bool(const std::string& key) const {
  std::string v = get(key);
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "' expects a boolean, got '" + get(key) + "'");
}

void Config::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      set(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

SolverConfig Config::solver_config() const {
  SolverConfig cfg;
  cfg.rank = get_int("rank");
  cfg.iters = get_int("iters");
  cfg.mu0 = get_double("mu0");
  cfg.rho = get_double("rho");
  if (get("rho1") != "auto") cfg.rho1 = get_double("rho1");
  if (get("rho2") != "auto") cfg.rho2 = get_double("rho2");
  cfg.c1 = get_double("c1");
  cfg.c2 = get_double("c2");
  cfg.eps = get_double("eps");
  cfg.block_h = get_int("block_h");
  cfg.block_w = get_int("block_w");
  cfg.fg_threshold = get_double("fg_threshold");
  cfg.validate();
  return cfg;
}

std::optional<std::pair<int, int>> Config::resize_spec() const {
  const int w = get_int("resize_w"), h = get_int("resize_h");
  if (w == 0 && h == 0) return std::nullopt;
  if (w < 1 || h < 1) throw ConfigError("resize_w and resize_h must both be positive");
  return std::make_pair(w, h);
}

}  // namespace uqrpca
