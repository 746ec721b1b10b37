#include "vkr/config.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace vkr {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> tokens(const std::string& value) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : value) {
    if (c == ' ' || c == '\t' || c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double parse_real(const std::string& tok, const std::string& key) {
  try {
    size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' has non-numeric value '" +
                      tok + "'");
  }
}

}  // namespace

Config Config::parse_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) +
                        " is not of the form 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config: empty key on line " + std::to_string(lineno));
    if (cfg.raw_.count(key))
      throw ConfigError("config: duplicate key '" + key + "'");
    cfg.raw_[key] = value;
  }
  return cfg;
}

Config Config::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

double Config::get_real(const std::string& key, double def) const {
  double v = def;
  if (const auto it = raw_.find(key); it != raw_.end()) {
    const auto toks = tokens(it->second);
    if (toks.size() != 1)
      throw ConfigError("config: key '" + key + "' expects a single number");
    v = parse_real(toks[0], key);
    consumed_.insert(key);
  }
  std::ostringstream os;
  os.precision(17);
  os << v;
  resolved_[key] = os.str();
  return v;
}

int Config::get_int(const std::string& key, int def) const {
  const double v = get_real(key, def);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw ConfigError("config: key '" + key + "' expects an integer");
  resolved_[key] = std::to_string(i);
  return i;
}

std::string Config::get_str(const std::string& key,
                            const std::string& def) const {
  std::string v = def;
  if (const auto it = raw_.find(key); it != raw_.end()) {
    v = it->second;
    consumed_.insert(key);
  }
  resolved_[key] = v;
  return v;
}

std::vector<double> Config::get_reals(const std::string& key,
                                      std::vector<double> def) const {
  std::vector<double> v = std::move(def);
  if (const auto it = raw_.find(key); it != raw_.end()) {
    v.clear();
    for (const auto& tok : tokens(it->second)) v.push_back(parse_real(tok, key));
    consumed_.insert(key);
  }
  std::ostringstream os;
  os.precision(17);
  for (size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
  resolved_[key] = os.str();
  return v;
}

void Config::reject_unknown() const {
  std::vector<std::string> unknown;
  for (const auto& [key, value] : raw_)
    if (!consumed_.count(key)) unknown.push_back(key);
  if (!unknown.empty()) {
    std::string msg = "config: unknown keys:";
    for (const auto& k : unknown) msg += " '" + k + "'";
    throw ConfigError(msg);
  }
}

std::vector<std::string> Config::resolved_lines() const {
  std::vector<std::string> out;
  for (const auto& [key, value] : resolved_)
    out.push_back(key + " = " + value);
  return out;
}

std::string Config::content_hash() const {
  uint64_t h = 1469598103934665603ull;
  const auto mix = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  for (const auto& [key, value] : raw_) {
    mix(key);
    mix("=");
    std::string canon;
    for (const auto& t : tokens(value)) canon += t + " ";
    mix(canon);
    mix("\n");
  }
  std::ostringstream os;
  os << "0x" << std::hex << h;
  return os.str();
}

}  // namespace vkr
