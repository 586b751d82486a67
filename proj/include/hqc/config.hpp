#pragma once

// Flat key-value configuration files (a TOML subset):
//
//   # comment
//   gate = "mixing"
//   sigma = 0.1
//   n_r = [1, 2, 5, 10]      # or the range string "1:100"
//
// Keys are bare identifiers, values are numbers, quoted or bare strings,
// or single-line arrays of numbers.

#include "errors.hpp"
#include "model.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace hqc {

class KeyValueConfig {
public:
  static KeyValueConfig parse(std::string_view text) {
    KeyValueConfig cfg;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
      ++lineNo;
      line = stripComment(line);
      const std::string body = trim(line);
      if (body.empty()) continue;
      const auto eq = body.find('=');
      if (eq == std::string::npos)
        throw ConfigError("line " + std::to_string(lineNo) + ": expected 'key = value'");
      std::string key = trim(body.substr(0, eq));
      std::string value = unquote(trim(body.substr(eq + 1)));
      if (key.empty()) throw ConfigError("line " + std::to_string(lineNo) + ": empty key");
      if (cfg.values_.contains(key)) throw ConfigError("duplicate key '" + key + "'");
      cfg.values_[key] = value;
    }
    return cfg;
  }

  static KeyValueConfig load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
  }

  bool has(const std::string& key) const { return values_.contains(key); }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  const std::map<std::string, std::string>& entries() const { return values_; }

  std::string getString(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double getDouble(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : toDouble(key, it->second);
  }

  std::int64_t getInt(const std::string& key, std::int64_t fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : toInt<std::int64_t>(key, it->second);
  }

  std::uint64_t getUint(const std::string& key, std::uint64_t fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : toInt<std::uint64_t>(key, it->second);
  }

  /// Integer list: "[a, b, c]" or the inclusive range "lo:hi".
  std::vector<int> getIntList(const std::string& key, std::vector<int> fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::string v = it->second;
    std::vector<int> out;
    if (auto colon = v.find(':'); colon != std::string::npos && v.find('[') == std::string::npos) {
      const int lo = toInt<int>(key, trim(v.substr(0, colon)));
      const int hi = toInt<int>(key, trim(v.substr(colon + 1)));
      if (hi < lo) throw ConfigError(key + ": empty range '" + v + "'");
      for (int k = lo; k <= hi; ++k) out.push_back(k);
      return out;
    }
    if (!v.empty() && v.front() == '[') {
      if (v.back() != ']') throw ConfigError(key + ": unterminated array");
      v = v.substr(1, v.size() - 2);
    }
    std::istringstream items(v);
    std::string item;
    while (std::getline(items, item, ',')) {
      item = trim(item);
      if (!item.empty()) out.push_back(toInt<int>(key, item));
    }
    return out;
  }

private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  static std::string stripComment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"') quoted = !quoted;
      if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
  }

  static std::string unquote(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
  }

  static double toDouble(const std::string& key, const std::string& v) {
    try {
      std::size_t used = 0;
      const double d = std::stod(v, &used);
      if (used != v.size()) throw ConfigError(key + ": trailing characters in '" + v + "'");
      return d;
    } catch (const std::logic_error&) {
      throw ConfigError(key + ": not a number: '" + v + "'");
    }
  }

  template <typename T>
  static T toInt(const std::string& key, const std::string& v) {
    T out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) throw ConfigError(key + ": not an integer: '" + v + "'");
    return out;
  }

  std::map<std::string, std::string> values_;
};

/// Gate schedule from the keys gate, omega_inv_fs, t_ad_fs, target_angle,
/// delta_mev and omega_single_mev.
inline LoopSchedule scheduleFromConfig(const KeyValueConfig& cfg) {
  const Gate gate = parseGate(cfg.getString("gate", "mixing"));
  const double omegaInv = cfg.getDouble("omega_inv_fs", 50.0);
  if (!(omegaInv > 0.0)) throw ConfigError("omega_inv_fs must be positive");
  const double omega = 1.0 / omegaInv;
  switch (gate) {
    case Gate::Mixing:
      return mixingLoop(omega, cfg.getDouble("t_ad_fs", 7500.0), cfg.getDouble("target_angle", std::numbers::pi / 2));
    case Gate::PhaseShift:
      return phaseShiftLoop(omega, cfg.getDouble("t_ad_fs", 7500.0),
                            cfg.getDouble("target_angle", std::numbers::pi / 2));
    case Gate::TwoQubitPhase: {
      const double delta = cfg.getDouble("delta_mev", 5.0);
      return twoQubitSchedule(delta, cfg.getDouble("omega_single_mev", delta / 15.0),
                              cfg.getDouble("t_ad_fs", 0.8 * units::kFsPerNs),
                              cfg.getDouble("target_angle", std::numbers::pi / 2));
    }
    case Gate::DynamicalPi:
      return dynamicalPiPulse(omega);
  }
  throw ConfigError("unsupported gate");
}

} // namespace hqc
