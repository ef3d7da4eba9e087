#ifndef DCSIM_CONFIG_HPP
#define DCSIM_CONFIG_HPP

#include <filesystem>
#include <map>
#include <string>

namespace dcsim {

/// Flat, sectioned key-value configuration file:
///
///   [psu]
///   rated_output_w = 870
///
/// Keys are addressed as "section.key"; units live in the key names.
class Config {
public:
  static Config load(const std::filesystem::path& path);
  static Config from_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const;
  std::string get(const std::string& key) const;                    // throws ConfigError
  std::string get_or(const std::string& key, std::string def) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double def) const;
  long long get_int(const std::string& key) const;
  long long get_int_or(const std::string& key, long long def) const;
  bool get_bool_or(const std::string& key, bool def) const;

  /// Resolves a path value relative to the config file's directory.
  std::filesystem::path get_path(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

private:
  std::map<std::string, std::string> entries_;
  std::filesystem::path base_dir_;
  std::string origin_;
};

} // namespace dcsim

#endif
