#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "vkr/errors.hpp"

namespace vkr {

// Flat key-value configuration with dotted section names:
//
//   # comment
//   material.mu  = 1.0
//   sweep.eps    = 0.4 0.2 0.1 0.05
//   loads.q_w    = sine 1 1
//
// Values are whitespace- or comma-separated tokens. Every key that a command
// reads is recorded with the value actually used (file or default); keys
// present in the file but never read are rejected, and the resolved set is
// echoed into the run manifest.
class Config {
 public:
  static Config parse_file(const std::filesystem::path& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& key) const { return raw_.count(key) > 0; }

  double get_real(const std::string& key, double def) const;
  int get_int(const std::string& key, int def) const;
  std::string get_str(const std::string& key, const std::string& def) const;
  std::vector<double> get_reals(const std::string& key,
                                std::vector<double> def) const;

  // Throws ConfigError if the file contains keys that were never read.
  void reject_unknown() const;

  // Resolved "key = value" lines, sorted by key.
  std::vector<std::string> resolved_lines() const;

  // FNV-1a hash of the canonicalized file content.
  std::string content_hash() const;

 private:
  std::map<std::string, std::string> raw_;  // key -> raw value text
  mutable std::set<std::string> consumed_;
  mutable std::map<std::string, std::string> resolved_;
};

}  // namespace vkr
