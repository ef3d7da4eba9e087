#include "dcsim/config.hpp"

#include "dcsim/errors.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace dcsim {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

} // namespace

Config Config::from_string(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    std::string full = section.empty() ? key : section + "." + key;
    if (cfg.entries_.count(full))
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + full + "'");
    cfg.entries_[full] = value;
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  Config cfg = from_string(buf.str(), path.string());
  cfg.base_dir_ = path.parent_path();
  return cfg;
}

bool Config::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string Config::get(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end())
    throw ConfigError(origin_ + ": missing required key '" + key + "'");
  return it->second;
}

std::string Config::get_or(const std::string& key, std::string def) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? def : it->second;
}

double Config::get_double(const std::string& key) const {
  const std::string v = get(key);
  char* end = nullptr;
  double d = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError(origin_ + ": key '" + key + "' is not a number: '" + v + "'");
  return d;
}

double Config::get_double_or(const std::string& key, double def) const {
  return has(key) ? get_double(key) : def;
}

long long Config::get_int(const std::string& key) const {
  const std::string v = get(key);
  char* end = nullptr;
  long long i = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError(origin_ + ": key '" + key + "' is not an integer: '" + v + "'");
  return i;
}

long long Config::get_int_or(const std::string& key, long long def) const {
  return has(key) ? get_int(key) : def;
}

bool Config::get_bool_or(const std::string& key, bool def) const {
  if (!has(key)) return def;
  const std::string v = get(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(origin_ + ": key '" + key + "' is not a boolean: '" + v + "'");
}

std::filesystem::path Config::get_path(const std::string& key) const {
  std::filesystem::path p = get(key);
  if (p.is_relative() && !base_dir_.empty()) p = base_dir_ / p;
  return p;
}

} // namespace dcsim
