#pragma once

// Experiment configuration in a TOML subset: [section] and [section.sub]
// headers, key = value lines, # comments. Values are numbers, "strings",
// true/false, or (possibly nested, possibly multi-line) arrays.
//
// Every error is ErrorKind::Config with an "origin:line: message" prefix.

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace degen {

struct ConfigValue {
  enum class Type { Number, String, Bool, Array };
  Type type = Type::Number;
  double number = 0.0;
  bool integral = false;  // written without fraction or exponent
  std::string text;
  bool flag = false;
  std::vector<ConfigValue> items;
  int line = 0;
};

const char* to_string(ConfigValue::Type type) noexcept;

class Config {
public:
  static Config parse(const std::string& text, const std::string& origin = "<config>");
  static Config load(const std::string& path);

  const std::string& origin() const noexcept { return origin_; }
  bool has_section(const std::string& section) const;
  const ConfigValue* find(const std::string& section, const std::string& key) const;

  // Typed getters return the fallback when the key is absent and throw
  // Config (with the value's line) on a type mismatch.
  double number(const std::string& section, const std::string& key, double fallback) const;
  int integer(const std::string& section, const std::string& key, int fallback) const;
  std::string string(const std::string& section, const std::string& key, const std::string& fallback) const;
  bool boolean(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& section, const std::string& key,
                              const std::vector<double>& fallback) const;
  std::vector<int> integers(const std::string& section, const std::string& key,
                            const std::vector<int>& fallback) const;
  std::vector<std::vector<int>> integer_rows(const std::string& section, const std::string& key) const;

  /// Positive number check with a line diagnostic.
  double positive(const std::string& section, const std::string& key, double fallback) const;

  /// Throws Config for a section not in the schema or a key not listed
  /// for its section.
  void check_schema(const std::map<std::string, std::vector<std::string>>& schema) const;

  [[noreturn]] void fail_at(int line, const std::string& message) const;

private:
  std::string origin_;
  std::map<std::string, std::map<std::string, ConfigValue>> entries_;
  std::map<std::string, int> section_lines_;

  friend class ConfigParser;
};

}  // namespace degen
